"""TCP sender with Vanilla, Reno, New Reno and SACK congestion control."""

from typing import Callable, Optional

from loguru import logger

from domain.engine import EventHandle, EventQueue
from domain.exceptions import ProtocolError
from domain.models import (
    EventKind,
    SenderCounters,
    SenderLogEntry,
    SenderState,
    TcpFlavor,
    TcpSegment,
)
from domain.tcp.rto import RtoEstimator
from domain.tcp.scoreboard import SendTable


DUP_ACK_THRESHOLD = 3
MAX_LOG_ENTRIES = 10_000


class TcpSender:
    """
    Persistent source: always has data, limited only by min(cwnd, rcvwnd).

    All window arithmetic is in bytes with integer division. Segment-granular
    gating: a new segment leaves only if the whole segment fits in the window.
    """

    def __init__(
        self,
        vc: int,
        flavor: TcpFlavor,
        mss: int,
        rcvwnd: int,
        clock: EventQueue,
        transmit: Callable[[TcpSegment], None],
        rto: Optional[RtoEstimator] = None,
        ack_counting: bool = True,
        sack_partial_acks: bool = True,
    ):
        if rcvwnd < 2 * mss:
            raise ValueError(f"Receive window {rcvwnd} below two segments of {mss}")
        self.vc = vc
        self.flavor = flavor
        self.mss = mss
        self.rcvwnd = rcvwnd
        self.clock = clock
        self.transmit = transmit
        self.rto = rto or RtoEstimator()
        self.ack_counting = ack_counting
        self.sack_partial_acks = sack_partial_acks

        self.cwnd = mss
        self.ssthresh = rcvwnd
        self.snd_una = 0
        self.snd_nxt = 0
        self.snd_max = 0
        self.dup_ack_count = 0
        self.recover = 0
        self.pipe = 0
        self.in_fast_recovery = False
        self.ca_ack_accum = 0
        self._ca_remainder = 0

        self.table = SendTable()
        self.counters = SenderCounters()
        self.log: list[SenderLogEntry] = []
        self.on_transition: Optional[Callable[["TcpSender"], None]] = None

        self._timer: Optional[EventHandle] = None
        self._timed_seq: Optional[int] = None
        self._timed_at = 0

    # ------------------------------------------------------------------ state

    @property
    def state(self) -> SenderState:
        if self.in_fast_recovery:
            return SenderState.FAST_RECOVERY
        if self.cwnd < self.ssthresh:
            return SenderState.SLOW_START
        return SenderState.CONGESTION_AVOIDANCE

    @property
    def flight(self) -> int:
        return self.snd_nxt - self.snd_una

    @property
    def uses_recover(self) -> bool:
        if self.flavor == TcpFlavor.NEW_RENO:
            return True
        return self.flavor == TcpFlavor.SACK and self.sack_partial_acks

    def _note(self, kind: str, seq: int) -> None:
        if len(self.log) < MAX_LOG_ENTRIES:
            self.log.append(SenderLogEntry(self.clock.now, kind, seq, self.cwnd))
        if self.on_transition is not None:
            self.on_transition(self)

    # ------------------------------------------------------------------ sending

    def _may_send_new(self) -> bool:
        return self.snd_nxt + self.mss - self.snd_una <= self.rcvwnd

    def _emit(self, seq: int, retransmission: bool) -> TcpSegment:
        seg = TcpSegment(
            vc=self.vc, seq=seq, payload_len=self.mss, is_retransmission=retransmission
        )
        self.counters.segments_sent += 1
        if retransmission:
            self.counters.retransmissions += 1
            self._timed_seq = None
        elif self._timed_seq is None:
            self._timed_seq = seq
            self._timed_at = self.clock.now
        if self.flavor == TcpFlavor.SACK:
            self.table.record_sent(seq, seq + self.mss)
            if retransmission:
                self.table.mark_retransmitted(seq)
        if self._timer is None:
            self._arm_timer()
        self.transmit(seg)
        return seg

    def _send_next(self) -> TcpSegment:
        seq = self.snd_nxt
        retransmission = seq < self.snd_max
        self.snd_nxt += self.mss
        if self.snd_nxt > self.snd_max:
            self.snd_max = self.snd_nxt
        return self._emit(seq, retransmission)

    def _retransmit(self, seq: int) -> TcpSegment:
        return self._emit(seq, retransmission=True)

    def try_send(self) -> list[TcpSegment]:
        """Emit every segment the current window allows."""
        sent: list[TcpSegment] = []
        if self.flavor == TcpFlavor.SACK and self.in_fast_recovery:
            while self.pipe < self.cwnd:
                hole = self.table.next_hole(self.snd_una, self.snd_nxt)
                if hole is not None:
                    sent.append(self._retransmit(hole.seq))
                    self._note("retransmit", hole.seq)
                elif self._may_send_new():
                    sent.append(self._send_next())
                else:
                    break
                self.pipe += self.mss
            return sent

        window = min(self.cwnd, self.rcvwnd)
        while self.flight + self.mss <= window and self._may_send_new():
            sent.append(self._send_next())
        return sent

    # ------------------------------------------------------------------ ACKs

    def on_ack(self, seg: TcpSegment) -> list[TcpSegment]:
        """Process one incoming ACK and send whatever it opens up."""
        ack = seg.ack
        if ack > self.snd_max:
            raise ProtocolError(
                f"VC {self.vc}: ACK {ack} beyond highest sequence sent {self.snd_max}"
            )
        if self.flavor == TcpFlavor.SACK and seg.sack_blocks:
            self.table.apply_sack(seg.sack_blocks, self.snd_una, self.snd_max)

        if ack > self.snd_una:
            self.on_new_ack(ack)
        elif ack == self.snd_una and self.snd_max > self.snd_una and seg.payload_len == 0:
            self.on_dup_ack()
        return self.try_send()

    def _advance(self, ack: int) -> int:
        acked = ack - self.snd_una
        self.snd_una = ack
        if self.snd_nxt < ack:
            self.snd_nxt = ack
        self.dup_ack_count = 0
        if self.flavor == TcpFlavor.SACK:
            self.table.ack_to(ack)
        if self._timed_seq is not None and ack > self._timed_seq:
            self.rto.sample(self.clock.now - self._timed_at)
            self._timed_seq = None
        self._restart_timer()
        return acked

    def on_new_ack(self, ack_num: int) -> None:
        if ack_num <= self.snd_una:
            raise ProtocolError(f"VC {self.vc}: ACK {ack_num} is not new (una {self.snd_una})")
        acked = self._advance(ack_num)

        if self.in_fast_recovery:
            if self.uses_recover:
                self.on_partial_or_full_ack(ack_num, acked)
            else:
                self._exit_recovery()
            return

        if self.cwnd < self.ssthresh:
            self.cwnd += self.mss
        else:
            self.cwnd += self.ca_increment()
        if self.cwnd > self.rcvwnd:
            self.cwnd = self.rcvwnd

    def ca_increment(self) -> int:
        """Congestion-avoidance growth for one new ACK, in bytes."""
        mss_sq = self.mss * self.mss
        if not self.ack_counting:
            return mss_sq // self.cwnd
        self.ca_ack_accum += 1
        numerator = self.ca_ack_accum * mss_sq + self._ca_remainder
        if numerator <= self.cwnd:
            return 0
        increment = numerator // self.cwnd
        self._ca_remainder = numerator - increment * self.cwnd
        self.ca_ack_accum = 0
        return increment

    def on_dup_ack(self) -> None:
        self.dup_ack_count += 1
        if self.flavor == TcpFlavor.VANILLA:
            return

        if self.in_fast_recovery:
            if self.flavor == TcpFlavor.SACK:
                self.pipe = max(self.pipe - self.mss, 0)
            else:
                self.cwnd += self.mss
            return

        if self.dup_ack_count != DUP_ACK_THRESHOLD:
            return

        old_cwnd = self.cwnd
        self.ssthresh = max(old_cwnd // 2, 2 * self.mss)
        self.recover = self.snd_max
        self.in_fast_recovery = True
        self.counters.fast_retransmits += 1
        self.counters.recovery_episodes += 1
        if self.flavor == TcpFlavor.SACK:
            self.pipe = max(old_cwnd - DUP_ACK_THRESHOLD * self.mss, 0)
            self.cwnd = self.ssthresh
        else:
            self.cwnd = self.ssthresh + DUP_ACK_THRESHOLD * self.mss
        logger.debug(
            f"VC {self.vc} {self.flavor.value}: fast retransmit {self.snd_una} "
            f"cwnd {old_cwnd} -> {self.cwnd}"
        )
        self._retransmit(self.snd_una)
        self._note("fast_retransmit", self.snd_una)

    def on_partial_or_full_ack(self, ack_num: int, acked: int) -> None:
        if ack_num >= self.recover:
            self._exit_recovery()
            return

        if self.flavor == TcpFlavor.NEW_RENO:
            self.cwnd = max(self.cwnd - acked + self.mss, self.mss)
            self._retransmit(self.snd_una)
            self._note("retransmit", self.snd_una)
        else:
            # pipe may exceed a halved cwnd when more than half the window was lost
            self.pipe = max(min(self.pipe, self.cwnd) - 2 * self.mss, 0)

    def _exit_recovery(self) -> None:
        self.in_fast_recovery = False
        self.cwnd = self.ssthresh
        self.pipe = 0
        self._note("recovery_exit", self.snd_una)

    # ------------------------------------------------------------------ timer

    def _arm_timer(self) -> None:
        self._timer = self.clock.schedule_in(
            self.rto.current_ns(),
            self.on_rto,
            kind=EventKind.RTO_EXPIRY,
            target=f"tcp{self.vc}",
        )

    def _restart_timer(self) -> None:
        self.clock.cancel(self._timer)
        self._timer = None
        if self.snd_una < self.snd_max:
            self._arm_timer()

    def on_rto(self) -> None:
        self._timer = None
        if self.snd_una >= self.snd_max:
            return
        self.ssthresh = max(self.cwnd // 2, 2 * self.mss)
        self.cwnd = self.mss
        self.in_fast_recovery = False
        self.pipe = 0
        self.dup_ack_count = 0
        self.ca_ack_accum = 0
        self._ca_remainder = 0
        if self.flavor == TcpFlavor.SACK:
            self.table.reset()
        self.snd_nxt = self.snd_una
        self._timed_seq = None
        self.rto.back_off()
        self.counters.timeouts += 1
        logger.debug(
            f"VC {self.vc} {self.flavor.value}: timeout at {self.clock.now} ns, "
            f"ssthresh {self.ssthresh}"
        )
        self._note("timeout", self.snd_una)
        self.try_send()

    # ------------------------------------------------------------------ start

    def start(self) -> list[TcpSegment]:
        self._note("start", 0)
        return self.try_send()
