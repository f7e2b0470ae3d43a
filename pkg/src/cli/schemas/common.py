from typing import Optional

from pydantic import BaseModel

from domain.metrics import RunResult
from domain.parsers.presets import Preset


class ErrorReport(BaseModel):
    exit_code: int
    detail: str
    error_type: str
    key: Optional[str] = None
    line: Optional[int] = None


class SourceRecord(BaseModel):
    vc: int
    start_ns: int
    delivered_bytes: int
    throughput_bps: float
    cells_in: int
    cells_delivered: int
    cells_dropped: int
    frames_lost: int
    segments_sent: int
    retransmissions: int
    fast_retransmits: int
    timeouts: int
    recovery_episodes: int
    final_cwnd: Optional[int] = None


class RunRecord(BaseModel):
    preset: str
    n_sources: int
    buffer: int
    flavor: str
    policy: str
    rate_scale: int
    duration_ns: int
    max_goodput_bps: float
    efficiency: float
    fairness: float
    retransmissions: int
    fast_retransmits: int
    timeouts: int
    drops_by_reason: dict[str, int]
    partial_frames: int
    max_occupancy: int
    events_fired: int
    sources: list[SourceRecord]

    @classmethod
    def from_result(cls, result: RunResult) -> "RunRecord":
        throughputs = result.throughputs
        return cls(
            preset=result.preset,
            n_sources=result.n_sources,
            buffer=result.buffer,
            flavor=result.flavor,
            policy=result.policy,
            rate_scale=result.rate_scale,
            duration_ns=result.duration_ns,
            max_goodput_bps=result.max_goodput,
            efficiency=round(result.efficiency, 6),
            fairness=round(result.fairness, 6),
            retransmissions=result.retransmissions,
            fast_retransmits=result.fast_retransmits,
            timeouts=result.timeouts,
            drops_by_reason=dict(sorted(result.drops_by_reason.items())),
            partial_frames=result.partial_frames,
            max_occupancy=result.max_occupancy,
            events_fired=result.events_fired,
            sources=[
                SourceRecord(
                    vc=s.vc,
                    start_ns=s.start_ns,
                    delivered_bytes=s.delivered_bytes,
                    throughput_bps=throughput,
                    cells_in=s.cells_in,
                    cells_delivered=s.cells_delivered,
                    cells_dropped=s.cells_dropped,
                    frames_lost=s.frames_lost,
                    segments_sent=s.counters.segments_sent,
                    retransmissions=s.counters.retransmissions,
                    fast_retransmits=s.counters.fast_retransmits,
                    timeouts=s.counters.timeouts,
                    recovery_episodes=s.counters.recovery_episodes,
                    final_cwnd=s.final_cwnd,
                )
                for s, throughput in zip(result.sources, throughputs)
            ],
        )


class PresetInfo(BaseModel):
    name: str
    description: str
    access_delay_ns: int
    backbone_delay_ns: int
    rtt_ns: int
    buffers: list[int]
    mss: int
    window: int
    duration_ns: int
    stagger_us: int

    @classmethod
    def from_preset(cls, preset: Preset) -> "PresetInfo":
        return cls(
            name=preset.name.value,
            description=preset.description,
            access_delay_ns=preset.access_delay_ns,
            backbone_delay_ns=preset.backbone_delay_ns,
            rtt_ns=preset.rtt_ns,
            buffers=list(preset.buffers),
            mss=preset.mss,
            window=preset.window,
            duration_ns=preset.duration_ns,
            stagger_us=preset.stagger_us,
        )


class CheckReport(BaseModel):
    name: str
    passed: bool
    detail: str
