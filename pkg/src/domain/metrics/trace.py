"""Periodic and event-driven sampling of sender and queue state."""

from typing import Iterable, Optional

from domain.engine import EventQueue
from domain.models import EventKind, TraceRow
from domain.switch import OutputPort
from domain.tcp import TcpSender


class TraceRecorder:
    """
    Collects `time_ns,series,value` rows.

    Sender series (`cwnd.<vc>`, `ssthresh.<vc>`, `state.<vc>`) are sampled every
    period and at every logged sender transition; queue series (`queue.X`,
    `queue.drops`) every period.
    """

    def __init__(
        self,
        clock: EventQueue,
        period_ns: int,
        senders: Iterable[TcpSender] = (),
        port: Optional[OutputPort] = None,
        include_senders: bool = True,
        include_queue: bool = True,
    ):
        if period_ns <= 0:
            raise ValueError(f"Trace period must be positive, got {period_ns} ns")
        self.clock = clock
        self.period_ns = period_ns
        self.senders = list(senders) if include_senders else []
        self.port = port if include_queue else None
        self.rows: list[TraceRow] = []

    def start(self) -> None:
        for sender in self.senders:
            sender.on_transition = self.record_sender
        self.clock.schedule(
            self.clock.now, self._tick, kind=EventKind.MEASUREMENT_TICK, target="trace"
        )

    def _tick(self) -> None:
        self.sample()
        self.clock.schedule_in(
            self.period_ns, self._tick, kind=EventKind.MEASUREMENT_TICK, target="trace"
        )

    def sample(self) -> None:
        for sender in self.senders:
            self.record_sender(sender)
        if self.port is not None:
            now = self.clock.now
            self.rows.append(TraceRow(now, "queue.X", self.port.occupancy))
            self.rows.append(TraceRow(now, "queue.drops", sum(self.port.drops.values())))

    def record_sender(self, sender: TcpSender) -> None:
        now = self.clock.now
        self.rows.append(TraceRow(now, f"cwnd.{sender.vc}", sender.cwnd))
        self.rows.append(TraceRow(now, f"ssthresh.{sender.vc}", sender.ssthresh))
        self.rows.append(TraceRow(now, f"state.{sender.vc}", sender.state.value))


def trace_sample(
    clock: EventQueue,
    period_ns: int,
    senders: Iterable[TcpSender] = (),
    port: Optional[OutputPort] = None,
) -> TraceRecorder:
    """Start sampling now and every `period_ns` after; rows accumulate on the recorder."""
    recorder = TraceRecorder(clock, period_ns, senders, port)
    recorder.start()
    return recorder


def series(rows: Iterable[TraceRow], name: str) -> list[tuple[int, float | int | str]]:
    """Extract one series as (time_ns, value) pairs."""
    return [(row.time_ns, row.value) for row in rows if row.series == name]
