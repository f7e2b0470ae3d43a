"""Output-buffered switch port: single FIFO of K cells feeding one link."""

from collections import Counter, deque
from typing import Callable, Iterable, Optional

from domain.engine import EventQueue, LinkClock
from domain.exceptions import InvariantViolation
from domain.models import Cell, DropDecision, DropReason, DropRecord, EventKind
from domain.switch.ledger import VcLedger, on_cell_arrival
from domain.switch.policies import DropPolicy


class ScriptedLoss:
    """Discard the first transmission of chosen data segments of one VC."""

    def __init__(self, vc: int, segment_indices: Iterable[int], mss: int):
        self.vc = vc
        self.mss = mss
        self.remaining: set[int] = set(segment_indices)
        self.fired: list[int] = []

    def claims(self, cell: Cell) -> bool:
        if cell.reverse or cell.vc != self.vc or cell.index_in_frame != 0:
            return False
        seg = cell.segment
        if seg.is_ack or seg.is_retransmission:
            return False
        index = seg.seq // self.mss
        if index not in self.remaining:
            return False
        self.remaining.discard(index)
        self.fired.append(index)
        return True


class OutputPort:
    """
    FIFO output queue with per-VC accounting and a drop policy.

    Each accepted cell's transmission finish time is fixed at enqueue, and its
    arrival at the next hop is scheduled right away. Cells whose transmission
    has finished are released from the ledger before every decision or sample.
    """

    def __init__(
        self,
        name: str,
        clock: EventQueue,
        capacity: int,
        policy: DropPolicy,
        rate_bps: int,
        propagation_ns: int,
        deliver: Callable[[Cell], None],
        record_drops: bool = False,
    ):
        self.name = name
        self.clock = clock
        self.policy = policy
        self.ledger = VcLedger(capacity)
        self.link = LinkClock(rate_bps)
        self.propagation_ns = propagation_ns
        self.deliver = deliver
        self.record_drops = record_drops
        self.scripted: Optional[ScriptedLoss] = None

        self._queue: deque[tuple[int, int]] = deque()
        self.arrivals: Counter[int] = Counter()
        self.departures: Counter[int] = Counter()
        self.drops: Counter[int] = Counter()
        self.drops_by_reason: Counter[DropReason] = Counter()
        self.drop_log: list[DropRecord] = []
        self.partial_frames = 0
        self._accepted_frame: dict[int, int] = {}
        self._partial_frame: dict[int, int] = {}
        self.max_occupancy = 0

    @property
    def occupancy(self) -> int:
        self.release(self.clock.now)
        return self.ledger.x

    def release(self, now: int) -> None:
        """Apply every departure that has completed by `now`."""
        queue = self._queue
        ledger = self.ledger
        while queue and queue[0][0] <= now:
            _, vc = queue.popleft()
            ledger.on_cell_departure(vc)
            self.departures[vc] += 1

    def receive(self, cell: Cell) -> DropDecision:
        now = self.clock.now
        self.release(now)
        self.arrivals[cell.vc] += 1

        scripted = self.scripted is not None and self.scripted.claims(cell)
        decision, reason = on_cell_arrival(self.ledger, self.policy, cell, scripted)

        if decision != DropDecision.ACCEPT:
            self.drops[cell.vc] += 1
            if reason is not None:
                self.drops_by_reason[reason] += 1
            if (
                self._accepted_frame.get(cell.vc) == cell.frame_id
                and self._partial_frame.get(cell.vc) != cell.frame_id
            ):
                self._partial_frame[cell.vc] = cell.frame_id
                self.partial_frames += 1
            if self.record_drops and reason is not None:
                self.drop_log.append(DropRecord(now, cell.vc, cell.frame_id, reason))
            return decision

        self.ledger.on_enqueue(cell.vc)
        self._accepted_frame[cell.vc] = cell.frame_id
        if self.ledger.x > self.max_occupancy:
            self.max_occupancy = self.ledger.x
        finish = self.link.transmit(now)
        self._queue.append((finish, cell.vc))
        self.clock.schedule(
            finish + self.propagation_ns,
            self.deliver,
            cell,
            kind=EventKind.CELL_ARRIVAL,
            target=self.name,
        )
        return decision

    def audit(self) -> None:
        self.release(self.clock.now)
        self.ledger.audit()
        for vc, arrived in self.arrivals.items():
            queued = self.ledger.occupancy(vc)
            if arrived != self.departures[vc] + self.drops[vc] + queued:
                raise InvariantViolation(
                    f"{self.name}: VC {vc} arrivals {arrived} != departures "
                    f"{self.departures[vc]} + drops {self.drops[vc]} + queued {queued}"
                )
