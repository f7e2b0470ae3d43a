import pytest

from domain.engine import EventQueue
from domain.models import PolicyKind
from domain.switch import DropPolicy, OutputPort, VcLedger

CELL_RATE_BPS = 424_000_000  # one cell per 1000 ns


@pytest.fixture
def ledger_factory():
    def _make(capacity=1000, occupancy=None):
        """Ledger preloaded with `occupancy` cells per VC."""
        ledger = VcLedger(capacity)
        for vc, cells in (occupancy or {}).items():
            for _ in range(cells):
                ledger.on_enqueue(vc)
        return ledger

    return _make


@pytest.fixture
def port_factory():
    def _make(capacity=20, kind=PolicyKind.TAIL_DROP, record_drops=False):
        clock = EventQueue()
        delivered = []
        port = OutputPort(
            "A->B",
            clock,
            capacity,
            DropPolicy(kind),
            CELL_RATE_BPS,
            0,
            delivered.append,
            record_drops=record_drops,
        )
        return port, clock, delivered

    return _make
