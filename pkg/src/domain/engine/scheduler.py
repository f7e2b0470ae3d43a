"""Deterministic discrete-event scheduler.

Events are ordered by (fire_at, seq) where seq is the insertion counter, so events
scheduled for the same instant fire in the order they were scheduled. Time is an
integer number of nanoseconds since the start of the run.
"""

import heapq
from dataclasses import dataclass
from itertools import count
from typing import Any, Callable, Iterator, Optional

from loguru import logger

from domain.exceptions import SchedulingError
from domain.models import EventKind


SimTime = int


@dataclass(slots=True, eq=False)
class SimEvent:
    """A scheduler entry."""

    fire_at: SimTime
    seq: int
    target: str
    kind: EventKind
    action: Callable[..., Any]
    args: tuple = ()
    cancelled: bool = False
    fired: bool = False


class EventHandle:
    """Opaque reference to a scheduled event, usable for cancellation."""

    __slots__ = ("_event",)

    def __init__(self, event: SimEvent):
        self._event = event

    @property
    def fire_at(self) -> SimTime:
        return self._event.fire_at

    @property
    def pending(self) -> bool:
        return not (self._event.cancelled or self._event.fired)


class EventQueue:
    """Virtual clock plus priority queue of pending events."""

    def __init__(self) -> None:
        self._heap: list[tuple[SimTime, int, SimEvent]] = []
        self._seq = count()
        self._now: SimTime = 0
        self._fired = 0
        self._last_fired: SimTime = 0

    @property
    def now(self) -> SimTime:
        return self._now

    @property
    def fired_total(self) -> int:
        """Events fired since the queue was created."""
        return self._fired

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(
        self,
        fire_at: SimTime,
        action: Callable[..., Any],
        *args: Any,
        kind: EventKind = EventKind.CELL_ARRIVAL,
        target: str = "",
    ) -> EventHandle:
        """Schedule `action(*args)` at absolute time `fire_at`."""
        if fire_at < self._now:
            logger.error(f"Rejected event at {fire_at} ns, clock is {self._now} ns")
            raise SchedulingError(
                f"Cannot schedule {kind.value} for {target or '?'} at {fire_at} ns; "
                f"clock is already {self._now} ns"
            )
        event = SimEvent(fire_at, next(self._seq), target, kind, action, args)
        heapq.heappush(self._heap, (fire_at, event.seq, event))
        return EventHandle(event)

    def schedule_in(
        self,
        delay: SimTime,
        action: Callable[..., Any],
        *args: Any,
        kind: EventKind = EventKind.CELL_ARRIVAL,
        target: str = "",
    ) -> EventHandle:
        """Schedule relative to the current clock."""
        return self.schedule(self._now + delay, action, *args, kind=kind, target=target)

    def cancel(self, handle: Optional[EventHandle]) -> bool:
        """Cancel a pending event; False if it already fired or was cancelled."""
        if handle is None:
            return False
        event = handle._event
        if event.cancelled or event.fired:
            return False
        event.cancelled = True
        return True

    def run_until(self, t_end: SimTime) -> int:
        """Fire every event with fire_at <= t_end in order; leave the clock at t_end."""
        if t_end < self._now:
            raise SchedulingError(f"run_until({t_end}) is behind the clock ({self._now})")

        heap = self._heap
        fired = 0
        while heap and heap[0][0] <= t_end:
            fire_at, _, event = heapq.heappop(heap)
            if event.cancelled:
                continue
            if fire_at < self._last_fired:
                raise SchedulingError(
                    f"Clock inversion: event at {fire_at} ns after one at {self._last_fired} ns"
                )
            self._now = fire_at
            self._last_fired = fire_at
            event.fired = True
            event.action(*event.args)
            fired += 1

        self._now = t_end
        self._fired += fired
        return fired

    def pending(self, kind: Optional[EventKind] = None) -> Iterator[SimEvent]:
        """Iterate over events that are still due to fire (unordered)."""
        for _, _, event in self._heap:
            if event.cancelled:
                continue
            if kind is None or event.kind == kind:
                yield event
