import pytest

from domain.framing import (
    FrameCounter,
    Reassembler,
    cells_per_segment,
    encapsulate,
    max_goodput,
    reassemble,
)
from domain.models import LINK_RATE_BPS, OVERHEAD, IncompleteFrame, TcpSegment


@pytest.mark.parametrize(
    "payload_len, expected",
    [
        (512, 12),
        (0, 2),
        (9180, 193),
        (520, 12),
        (521, 13),
    ],
)
def test_cells_per_segment(payload_len, expected) -> None:
    assert cells_per_segment(payload_len) == expected


def test_cells_per_segment_matches_layout() -> None:
    for payload_len in range(0, 2000):
        frame = payload_len + OVERHEAD.total
        cells = 0
        packed = 0
        while packed < frame:
            packed += OVERHEAD.cell_payload
            cells += 1
        assert cells_per_segment(payload_len) == cells


def test_cells_per_segment_rejects_negative() -> None:
    with pytest.raises(ValueError):
        cells_per_segment(-1)


def test_encapsulate_marks_last_cell() -> None:
    seg = TcpSegment(vc=3, seq=1024, payload_len=512)
    burst = encapsulate(seg, frame_id=7)

    assert len(burst) == 12
    assert [c.index_in_frame for c in burst.cells] == list(range(12))
    assert [c.eom for c in burst.cells] == [False] * 11 + [True]
    assert all(c.frame_id == 7 and c.vc == 3 for c in burst.cells)


def test_encapsulate_ack_only_segment() -> None:
    ack = TcpSegment(vc=0, seq=0, payload_len=0, ack=512, is_ack=True)

    assert len(encapsulate(ack, frame_id=0, reverse=True)) == 2


def test_reassemble_complete_frame() -> None:
    seg = TcpSegment(vc=1, seq=0, payload_len=512)

    assert reassemble(list(encapsulate(seg, 0).cells)) == seg


def test_reassemble_missing_middle_cell() -> None:
    cells = list(encapsulate(TcpSegment(vc=1, seq=0, payload_len=512), 0).cells)
    del cells[5]

    result = reassemble(cells)

    assert isinstance(result, IncompleteFrame)
    assert result.cells_received == 11
    assert result.cells_expected == 12


def test_reassembler_detects_missing_eom() -> None:
    reassembler = Reassembler()
    first = encapsulate(TcpSegment(vc=0, seq=0, payload_len=512), 0).cells
    second = encapsulate(TcpSegment(vc=0, seq=512, payload_len=512), 1).cells

    for cell in first[:-1]:
        assert reassembler.push(cell) is None
    lost = reassembler.push(second[0])
    for cell in second[1:-1]:
        reassembler.push(cell)
    delivered = reassembler.push(second[-1])

    assert isinstance(lost, IncompleteFrame) and lost.frame_id == 0
    assert isinstance(delivered, TcpSegment) and delivered.seq == 512
    assert reassembler.frames_lost == 1
    assert reassembler.frames_delivered == 1


def test_reassembler_drops_frame_missing_first_cell() -> None:
    reassembler = Reassembler()
    cells = encapsulate(TcpSegment(vc=0, seq=0, payload_len=512), 0).cells

    results = [reassembler.push(cell) for cell in cells[1:]]

    assert isinstance(results[-1], IncompleteFrame)
    assert reassembler.cells_received == 11


def test_frame_counter_is_per_vc() -> None:
    counter = FrameCounter()

    assert [counter.next_id(0), counter.next_id(0), counter.next_id(1)] == [0, 1, 0]


def test_max_goodput_for_512_byte_segments() -> None:
    goodput = max_goodput(LINK_RATE_BPS, 512)

    assert goodput == pytest.approx(125.2e6, abs=0.05e6)
    assert goodput / LINK_RATE_BPS == pytest.approx(0.805, abs=0.001)


def test_max_goodput_for_satellite_segments() -> None:
    assert max_goodput(LINK_RATE_BPS, 9180) == pytest.approx(139.57e6, abs=0.01e6)


@pytest.mark.parametrize("rate, mss", [(0, 512), (LINK_RATE_BPS, 0)])
def test_max_goodput_rejects_bad_input(rate, mss) -> None:
    with pytest.raises(ValueError):
        max_goodput(rate, mss)


def test_missing_eom_closed_by_next_frames_eom_counts_both() -> None:
    reassembler = Reassembler()
    first = encapsulate(TcpSegment(vc=0, seq=0, payload_len=512), 0).cells
    second = encapsulate(TcpSegment(vc=0, seq=512, payload_len=512), 1).cells

    for cell in first[:-1]:
        reassembler.push(cell)
    result = reassembler.push(second[-1])

    assert isinstance(result, IncompleteFrame) and result.frame_id == 1
    assert reassembler.frames_lost == 2
    assert reassembler.frames_delivered == 0
