from domain.metrics.measures import (
    efficiency,
    fairness,
    fairness_from_throughputs,
    sack_recovery_bound,
    throughput_bps,
)
from domain.metrics.results import MACHINE_HEADER, RunResult
from domain.metrics.trace import TraceRecorder, series, trace_sample

__all__ = [
    "MACHINE_HEADER",
    "RunResult",
    "TraceRecorder",
    "efficiency",
    "fairness",
    "fairness_from_throughputs",
    "sack_recovery_bound",
    "series",
    "throughput_bps",
    "trace_sample",
]
