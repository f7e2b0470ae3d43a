"""TCP/IP over LLC/AAL5 framing: segmentation into cells and reassembly."""

from dataclasses import dataclass
from typing import Optional, Union

from domain.models import OVERHEAD, Cell, CellBurst, IncompleteFrame, TcpSegment


def cells_per_segment(payload_len: int) -> int:
    """Number of 48-byte cell payloads needed for one frame."""
    if payload_len < 0:
        raise ValueError(f"Negative payload length: {payload_len}")
    return -(-(payload_len + OVERHEAD.total) // OVERHEAD.cell_payload)


def max_goodput(link_rate: float, mss: int) -> float:
    """Highest TCP payload rate (bits/s) a link of `link_rate` can carry at this MSS."""
    if link_rate <= 0 or mss <= 0:
        raise ValueError("Link rate and MSS must be positive")
    cell_efficiency = OVERHEAD.cell_payload / OVERHEAD.cell_size
    frame_efficiency = mss / (OVERHEAD.cell_payload * cells_per_segment(mss))
    return link_rate * cell_efficiency * frame_efficiency


class FrameCounter:
    """Monotone per-VC frame numbering."""

    def __init__(self) -> None:
        self._next: dict[int, int] = {}

    def next_id(self, vc: int) -> int:
        frame_id = self._next.get(vc, 0)
        self._next[vc] = frame_id + 1
        return frame_id


def encapsulate(seg: TcpSegment, frame_id: int, reverse: bool = False) -> CellBurst:
    """Segment a TCP segment into the cells of one AAL5 frame."""
    n = cells_per_segment(seg.payload_len)
    cells = tuple(
        Cell(
            vc=seg.vc,
            frame_id=frame_id,
            index_in_frame=i,
            eom=(i == n - 1),
            frame_cells=n,
            segment=seg,
            reverse=reverse,
        )
        for i in range(n)
    )
    return CellBurst(vc=seg.vc, frame_id=frame_id, cells=cells)


@dataclass
class _PartialFrame:
    frame_id: int
    expected: int
    received: int = 0
    broken: bool = False


class Reassembler:
    """
    Per-VC AAL5 reassembly at a destination.

    Cells of one VC arrive in order (FIFO links), so a frame is complete iff
    indices 0..n-1 arrive without a gap. A missing EOM is noticed when the next
    frame's first cell shows up.
    """

    def __init__(self) -> None:
        self._partial: dict[int, _PartialFrame] = {}
        self.frames_delivered = 0
        self.frames_lost = 0
        self.cells_received = 0

    def push(self, cell: Cell) -> Optional[Union[TcpSegment, IncompleteFrame]]:
        """Feed one cell; returns a segment or IncompleteFrame when a frame closes."""
        self.cells_received += 1
        lost: Optional[IncompleteFrame] = None
        current = self._partial.get(cell.vc)

        if current is not None and current.frame_id != cell.frame_id:
            assert cell.frame_id > current.frame_id, "frames interleaved on one VC"
            lost = self._close_lost(cell.vc, current)
            current = None

        if current is None:
            current = _PartialFrame(frame_id=cell.frame_id, expected=cell.frame_cells)
            self._partial[cell.vc] = current
            if cell.index_in_frame != 0:
                current.broken = True

        if cell.index_in_frame != current.received and not current.broken:
            current.broken = True
        current.received += 1

        if not cell.eom:
            return lost

        del self._partial[cell.vc]
        if current.broken or current.received != current.expected:
            return self._close_lost(cell.vc, current)
        self.frames_delivered += 1
        return cell.segment

    def _close_lost(self, vc: int, frame: _PartialFrame) -> IncompleteFrame:
        self.frames_lost += 1
        return IncompleteFrame(
            vc=vc,
            frame_id=frame.frame_id,
            cells_received=frame.received,
            cells_expected=frame.expected,
        )


def reassemble(cells: list[Cell]) -> Union[TcpSegment, IncompleteFrame]:
    """Reassemble the cells of one frame of one VC."""
    if not cells:
        raise ValueError("No cells to reassemble")
    reassembler = Reassembler()
    result: Optional[Union[TcpSegment, IncompleteFrame]] = None
    for cell in cells:
        result = reassembler.push(cell)
    if result is None:
        first = cells[0]
        return IncompleteFrame(
            vc=first.vc,
            frame_id=first.frame_id,
            cells_received=len(cells),
            cells_expected=first.frame_cells,
        )
    return result
