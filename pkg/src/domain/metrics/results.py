"""End-of-run results and their machine-row rendering."""

from dataclasses import dataclass, field

from domain.metrics.measures import (
    efficiency,
    fairness_from_throughputs,
    throughput_bps,
)
from domain.models import DropRecord, SourceStats, TraceRow


MACHINE_HEADER = "preset,n,K,flavor,policy,efficiency,fairness,timeouts"


@dataclass
class RunResult:
    """Everything measured in one simulation run."""

    preset: str
    n_sources: int
    buffer: int
    flavor: str
    policy: str
    rate_scale: int
    duration_ns: int
    max_goodput: float
    sources: list[SourceStats]
    drops_by_reason: dict[str, int] = field(default_factory=dict)
    events_fired: int = 0
    partial_frames: int = 0
    max_occupancy: int = 0
    traces: list[TraceRow] = field(default_factory=list)
    drop_log: list[DropRecord] = field(default_factory=list)

    @property
    def delivered_bytes(self) -> list[int]:
        return [s.delivered_bytes for s in self.sources]

    @property
    def throughputs(self) -> list[float]:
        return [throughput_bps(s.delivered_bytes, self.duration_ns) for s in self.sources]

    @property
    def efficiency(self) -> float:
        return efficiency(self.throughputs, self.max_goodput)

    @property
    def fairness(self) -> float:
        return fairness_from_throughputs(self.throughputs, self.max_goodput)

    @property
    def timeouts(self) -> int:
        return sum(s.counters.timeouts for s in self.sources)

    @property
    def retransmissions(self) -> int:
        return sum(s.counters.retransmissions for s in self.sources)

    @property
    def fast_retransmits(self) -> int:
        return sum(s.counters.fast_retransmits for s in self.sources)

    def machine_row(self) -> str:
        return (
            f"{self.preset},{self.n_sources},{self.buffer},{self.flavor},{self.policy},"
            f"{self.efficiency:.4f},{self.fairness:.4f},{self.timeouts}"
        )
