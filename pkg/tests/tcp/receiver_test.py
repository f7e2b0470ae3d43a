import pytest

from domain.exceptions import InvariantViolation
from domain.models import SackBlock, TcpFlavor, TcpSegment
from domain.tcp import TcpReceiver

MSS = 512


def _segment(index: int) -> TcpSegment:
    return TcpSegment(vc=0, seq=index * MSS, payload_len=MSS)


def test_in_order_segment_is_acknowledged() -> None:
    receiver = TcpReceiver(0, TcpFlavor.SACK)

    ack = receiver.receiver_on_segment(_segment(0))

    assert ack.is_ack
    assert ack.ack == MSS
    assert ack.sack_blocks == ()
    assert receiver.delivered_bytes == MSS


def test_out_of_order_segments_produce_duplicate_acks() -> None:
    receiver = TcpReceiver(0, TcpFlavor.RENO)
    receiver.receiver_on_segment(_segment(0))

    acks = [receiver.receiver_on_segment(_segment(i)) for i in (2, 3, 4)]

    assert [a.ack for a in acks] == [MSS] * 3
    assert all(a.sack_blocks == () for a in acks)
    assert receiver.delivered_bytes == MSS


def test_filling_the_hole_delivers_held_data() -> None:
    receiver = TcpReceiver(0, TcpFlavor.SACK)
    for i in (0, 2, 3, 4):
        receiver.receiver_on_segment(_segment(i))

    ack = receiver.receiver_on_segment(_segment(1))

    assert ack.ack == 5 * MSS
    assert ack.sack_blocks == ()
    assert len(receiver.blocks) == 0


def test_duplicate_segment_resends_ack() -> None:
    receiver = TcpReceiver(0, TcpFlavor.SACK)
    receiver.receiver_on_segment(_segment(0))

    ack = receiver.receiver_on_segment(_segment(0))

    assert ack.ack == MSS
    assert receiver.duplicates == 1
    assert receiver.delivered_bytes == MSS


def test_sack_option_lists_latest_block_first() -> None:
    receiver = TcpReceiver(0, TcpFlavor.SACK)
    for i in (2, 4, 6, 8):
        ack = receiver.receiver_on_segment(_segment(i))

    assert ack.sack_blocks == (
        SackBlock(8 * MSS, 9 * MSS),
        SackBlock(6 * MSS, 7 * MSS),
        SackBlock(4 * MSS, 5 * MSS),
    )


def test_sack_option_reports_extended_block_first() -> None:
    receiver = TcpReceiver(0, TcpFlavor.SACK)
    for i in (2, 6, 3):
        ack = receiver.receiver_on_segment(_segment(i))

    assert ack.sack_blocks[0] == SackBlock(2 * MSS, 4 * MSS)
    assert ack.sack_blocks[1] == SackBlock(6 * MSS, 7 * MSS)


def test_acks_are_passed_to_the_wire() -> None:
    wire = []
    receiver = TcpReceiver(0, TcpFlavor.NEW_RENO, send_ack=wire.append)

    receiver.receiver_on_segment(_segment(0))
    receiver.receiver_on_segment(_segment(1))

    assert [a.ack for a in wire] == [MSS, 2 * MSS]


def test_audit_rejects_block_touching_delivered_prefix() -> None:
    receiver = TcpReceiver(0, TcpFlavor.SACK)
    receiver.receiver_on_segment(_segment(2))
    receiver.rcv_nxt = 2 * MSS

    with pytest.raises(InvariantViolation):
        receiver.audit()
