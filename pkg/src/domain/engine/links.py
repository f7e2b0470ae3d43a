"""Exact serialization timing for fixed-rate links."""

from typing import TYPE_CHECKING, Callable

from domain.models import NS_PER_SECOND, OVERHEAD, Cell, EventKind

if TYPE_CHECKING:
    from domain.engine.scheduler import EventQueue


CELL_BITS = OVERHEAD.cell_size * 8


class LinkClock:
    """
    Busy-until bookkeeping for one transmitter.

    Times are kept internally in units of ns * rate_bps so that a cell time of
    424e9 / rate_bps ns is an integer step; converting back to ns rounds up.
    """

    __slots__ = ("rate_bps", "_cell_units", "_busy_until")

    def __init__(self, rate_bps: int):
        if rate_bps <= 0:
            raise ValueError(f"Link rate must be positive, got {rate_bps}")
        self.rate_bps = rate_bps
        self._cell_units = CELL_BITS * NS_PER_SECOND
        self._busy_until = 0

    @property
    def cell_time_ns(self) -> float:
        return self._cell_units / self.rate_bps

    def busy_until_ns(self) -> int:
        return -(-self._busy_until // self.rate_bps)

    def transmit(self, now_ns: int) -> int:
        """Reserve the transmitter for one cell; return its finish time in ns."""
        start = max(now_ns * self.rate_bps, self._busy_until)
        self._busy_until = start + self._cell_units
        return -(-self._busy_until // self.rate_bps)


class Transmitter:
    """Unbuffered sender-side link: infinite FIFO, fixed rate, fixed propagation."""

    def __init__(
        self,
        name: str,
        clock: "EventQueue",
        rate_bps: int,
        propagation_ns: int,
        deliver: Callable[[Cell], None],
    ):
        self.name = name
        self.clock = clock
        self.link = LinkClock(rate_bps)
        self.propagation_ns = propagation_ns
        self.deliver = deliver
        self.cells_sent = 0

    def send(self, cell: Cell) -> int:
        """Queue one cell behind earlier ones; return its arrival time at the far end."""
        finish = self.link.transmit(self.clock.now)
        arrival = finish + self.propagation_ns
        self.clock.schedule(
            arrival, self.deliver, cell, kind=EventKind.CELL_ARRIVAL, target=self.name
        )
        self.cells_sent += 1
        return arrival
