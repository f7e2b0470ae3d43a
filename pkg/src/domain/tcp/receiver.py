"""TCP receiver: immediate ACKs, out-of-order tracking, SACK generation."""

from typing import Callable, Optional

from domain.exceptions import InvariantViolation
from domain.models import TcpFlavor, TcpSegment
from domain.tcp.scoreboard import RecvBlocks


class TcpReceiver:
    """Destination endpoint of one connection. The delayed-ACK timer is off."""

    def __init__(
        self,
        vc: int,
        flavor: TcpFlavor,
        send_ack: Optional[Callable[[TcpSegment], None]] = None,
    ):
        self.vc = vc
        self.flavor = flavor
        self.send_ack = send_ack
        self.rcv_nxt = 0
        self.blocks = RecvBlocks()
        self.segments_received = 0
        self.duplicates = 0

    @property
    def delivered_bytes(self) -> int:
        """Bytes handed to the application; always the in-order prefix."""
        return self.rcv_nxt

    def receiver_on_segment(self, seg: TcpSegment) -> TcpSegment:
        """Absorb one data segment and emit exactly one ACK for it."""
        self.segments_received += 1

        if seg.seq <= self.rcv_nxt < seg.end:
            self.rcv_nxt = self.blocks.advance(seg.end)
        elif seg.seq > self.rcv_nxt:
            self.blocks.record_arrival(seg.seq, seg.end)
        else:
            self.duplicates += 1

        sack = self.blocks.make_sack_option() if self.flavor == TcpFlavor.SACK else ()
        ack = TcpSegment(
            vc=self.vc,
            seq=0,
            payload_len=0,
            ack=self.rcv_nxt,
            sack_blocks=sack,
            is_ack=True,
        )
        if self.send_ack is not None:
            self.send_ack(ack)
        return ack

    def audit(self) -> None:
        """Held out-of-order ranges must sit strictly above rcv_nxt."""
        previous_right = self.rcv_nxt
        for left, right in self.blocks.ranges:
            if left <= previous_right:
                raise InvariantViolation(
                    f"VC {self.vc}: receive block [{left}, {right}) touches {previous_right}"
                )
            previous_right = right
