"""Per-VC buffer accounting and frame acceptance state."""

from collections import Counter
from enum import Enum
from typing import Optional

from domain.exceptions import InvariantViolation
from domain.models import Cell, DropDecision, DropReason, PolicyKind
from domain.switch.policies import DropPolicy, fba_test, selective_drop_test


class FrameMode(str, Enum):
    IDLE = "idle"
    ACCEPTING = "accepting"
    DISCARDING = "discarding"


class VcLedger:
    """Occupancy X, per-VC occupancy Y[i], active count Na, capacity K."""

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError(f"Buffer capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.x = 0
        self.y: Counter[int] = Counter()
        self.na = 0
        self.frame_mode: dict[int, FrameMode] = {}

    def occupancy(self, vc: int) -> int:
        return self.y.get(vc, 0)

    def on_enqueue(self, vc: int) -> None:
        if self.x >= self.capacity:
            raise InvariantViolation(f"Enqueue into a full buffer (K={self.capacity})")
        if self.y[vc] == 0:
            self.na += 1
        self.y[vc] += 1
        self.x += 1

    def on_cell_departure(self, vc: int) -> None:
        if self.y.get(vc, 0) <= 0:
            raise InvariantViolation(f"Departure of VC {vc} with no buffered cells")
        self.y[vc] -= 1
        self.x -= 1
        if self.y[vc] == 0:
            del self.y[vc]
            self.na -= 1

    def audit(self) -> None:
        if self.x != sum(self.y.values()):
            raise InvariantViolation(f"X={self.x} but sum(Y)={sum(self.y.values())}")
        if not (0 <= self.x <= self.capacity):
            raise InvariantViolation(f"X={self.x} outside [0, {self.capacity}]")
        active = sum(1 for v in self.y.values() if v > 0)
        if self.na != active:
            raise InvariantViolation(f"Na={self.na} but {active} VCs hold cells")


def on_cell_arrival(
    ledger: VcLedger, policy: DropPolicy, cell: Cell, scripted: bool = False
) -> tuple[DropDecision, Optional[DropReason]]:
    """
    Decide the fate of one arriving cell and update frame state.

    Policy tests run only at a frame's first cell and bind the whole frame.
    A full buffer always drops the cell.
    """
    vc = cell.vc
    x = ledger.x
    full = x >= ledger.capacity

    mode = ledger.frame_mode.get(vc, FrameMode.IDLE)

    # tail drop keeps no frame state except for a scripted frame being discarded
    if policy.kind == PolicyKind.TAIL_DROP and not scripted and mode != FrameMode.DISCARDING:
        if full:
            return DropDecision.DROP_CELL_ONLY, DropReason.OVERFLOW
        return DropDecision.ACCEPT, None

    decision: DropDecision
    reason: Optional[DropReason]

    if cell.index_in_frame == 0:
        reason = _frame_admission(ledger, policy, vc, scripted)
        if reason is None and full:
            reason = DropReason.OVERFLOW
        if reason is None:
            mode = FrameMode.ACCEPTING
            decision = DropDecision.ACCEPT
        else:
            mode = FrameMode.DISCARDING
            decision = DropDecision.DROP_WHOLE_FRAME
    elif mode == FrameMode.DISCARDING:
        decision, reason = DropDecision.DROP_WHOLE_FRAME, DropReason.FRAME_DISCARD
    elif full:
        mode = FrameMode.DISCARDING
        decision, reason = DropDecision.DROP_CELL_ONLY, DropReason.OVERFLOW
    else:
        decision, reason = DropDecision.ACCEPT, None

    if cell.eom:
        ledger.frame_mode.pop(vc, None)
    else:
        ledger.frame_mode[vc] = mode
    return decision, reason


def _frame_admission(
    ledger: VcLedger, policy: DropPolicy, vc: int, scripted: bool
) -> Optional[DropReason]:
    if scripted:
        return DropReason.SCRIPTED
    r_cells = policy.r_cells(ledger.capacity)
    if policy.kind == PolicyKind.EPD:
        return DropReason.EPD_THRESHOLD if ledger.x > r_cells else None
    if policy.kind == PolicyKind.SELECTIVE_DROP:
        drop = selective_drop_test(ledger.x, r_cells, ledger.occupancy(vc), ledger.na, policy.z)
        return DropReason.SELECTIVE if drop else None
    if policy.kind == PolicyKind.FBA:
        drop = fba_test(
            ledger.x, ledger.capacity, r_cells, ledger.occupancy(vc), ledger.na, policy.z
        )
        return DropReason.FBA if drop else None
    return None
