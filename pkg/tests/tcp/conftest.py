import pytest

from domain.engine import EventQueue
from domain.models import SackBlock, TcpFlavor, TcpSegment
from domain.tcp import TcpSender

MSS = 512


@pytest.fixture
def sender_factory():
    def _make(flavor=TcpFlavor.RENO, rcvwnd=65536, window_segments=None, ack_counting=True):
        """Sender plus the list of segments it handed to the wire."""
        clock = EventQueue()
        sent: list[TcpSegment] = []
        sender = TcpSender(
            vc=0,
            flavor=flavor,
            mss=MSS,
            rcvwnd=rcvwnd,
            clock=clock,
            transmit=sent.append,
            ack_counting=ack_counting,
        )
        if window_segments is not None:
            sender.cwnd = window_segments * MSS
            sender.try_send()
        return sender, sent

    return _make


@pytest.fixture
def make_ack():
    def _make(ack, blocks=()):
        return TcpSegment(
            vc=0,
            seq=0,
            payload_len=0,
            ack=ack,
            sack_blocks=tuple(SackBlock(left, right) for left, right in blocks),
            is_ack=True,
        )

    return _make
