"""Data models for ubr-sack-sim."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


NS_PER_SECOND = 1_000_000_000
NS_PER_MS = 1_000_000
NS_PER_US = 1_000

LINK_RATE_BPS = 155_520_000


class TcpFlavor(str, Enum):
    """Congestion-control variant, fixed per connection."""

    VANILLA = "vanilla"
    RENO = "reno"
    NEW_RENO = "newreno"
    SACK = "sack"


class PolicyKind(str, Enum):
    """Switch buffer-management policy."""

    TAIL_DROP = "tail_drop"
    EPD = "epd"
    SELECTIVE_DROP = "selective_drop"
    FBA = "fba"


class DropDecision(str, Enum):
    """Outcome of a cell arrival at an output port."""

    ACCEPT = "accept"
    DROP_CELL_ONLY = "drop_cell_only"
    DROP_WHOLE_FRAME = "drop_whole_frame"


class DropReason(str, Enum):
    """Why a cell was discarded (drop log column)."""

    OVERFLOW = "overflow"
    EPD_THRESHOLD = "epd_threshold"
    SELECTIVE = "selective"
    FBA = "fba"
    FRAME_DISCARD = "frame_discard"
    SCRIPTED = "scripted"


class EventKind(str, Enum):
    """Payload kinds carried by scheduler entries."""

    CELL_ARRIVAL = "cell_arrival"
    SEGMENT_DELIVERY = "segment_delivery"
    RTO_EXPIRY = "rto_expiry"
    MEASUREMENT_TICK = "measurement_tick"
    SOURCE_START = "source_start"


class SenderState(str, Enum):
    """Coarse congestion state, used in traces."""

    SLOW_START = "slow_start"
    CONGESTION_AVOIDANCE = "congestion_avoidance"
    FAST_RECOVERY = "fast_recovery"


@dataclass(frozen=True)
class FrameOverhead:
    """Per-frame header and trailer sizes of TCP/IP over LLC/AAL5."""

    tcp_hdr: int = 20
    ip_hdr: int = 20
    llc: int = 8
    aal5_trailer: int = 8
    cell_payload: int = 48
    cell_size: int = 53

    @property
    def total(self) -> int:
        """Bytes added to every TCP payload before cell segmentation."""
        return self.tcp_hdr + self.ip_hdr + self.llc + self.aal5_trailer


OVERHEAD = FrameOverhead()


@dataclass(frozen=True)
class SackBlock:
    """One received byte range [left, right) reported in a SACK option."""

    left: int
    right: int

    def __post_init__(self) -> None:
        if self.left >= self.right:
            raise ValueError(f"Empty SACK block [{self.left}, {self.right})")


@dataclass(frozen=True)
class TcpSegment:
    """A TCP segment as seen by the simulator; no payload bytes are carried."""

    vc: int
    seq: int
    payload_len: int
    ack: int = 0
    sack_blocks: tuple[SackBlock, ...] = ()
    is_ack: bool = False
    is_retransmission: bool = False

    def __post_init__(self) -> None:
        if len(self.sack_blocks) > 3:
            raise ValueError("At most three SACK blocks fit in the option")
        if self.payload_len < 0:
            raise ValueError("Negative payload length")

    @property
    def end(self) -> int:
        """Sequence number following the last payload byte."""
        return self.seq + self.payload_len


@dataclass(slots=True)
class Cell:
    """One 53-byte ATM cell; structural metadata only."""

    vc: int
    frame_id: int
    index_in_frame: int
    eom: bool
    frame_cells: int
    segment: TcpSegment
    reverse: bool = False


@dataclass(frozen=True)
class CellBurst:
    """All cells of one AAL5 frame, in transmission order."""

    vc: int
    frame_id: int
    cells: tuple[Cell, ...]

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class IncompleteFrame:
    """A frame whose cells did not all arrive; counted as a frame-level loss."""

    vc: int
    frame_id: int
    cells_received: int
    cells_expected: int


@dataclass(frozen=True)
class DropRecord:
    """One drop log row."""

    time_ns: int
    vc: int
    frame_id: int
    reason: DropReason


@dataclass
class SenderLogEntry:
    """Retransmission or state-transition event recorded by a sender."""

    time_ns: int
    kind: str
    seq: int
    cwnd: int


@dataclass
class SenderCounters:
    """Cumulative per-connection counters."""

    segments_sent: int = 0
    retransmissions: int = 0
    fast_retransmits: int = 0
    timeouts: int = 0
    recovery_episodes: int = 0


@dataclass
class TraceRow:
    """One delimiter-separated trace row."""

    time_ns: int
    series: str
    value: float | int | str


@dataclass
class SourceStats:
    """End-of-run view of one source/destination pair."""

    vc: int
    delivered_bytes: int
    counters: SenderCounters = field(default_factory=SenderCounters)
    cells_in: int = 0
    cells_delivered: int = 0
    cells_dropped: int = 0
    frames_lost: int = 0
    start_ns: int = 0
    log: list[SenderLogEntry] = field(default_factory=list)
    final_cwnd: Optional[int] = None
