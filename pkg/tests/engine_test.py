import pytest

from domain.engine import EventQueue, LinkClock, Transmitter
from domain.exceptions import SchedulingError
from domain.models import NS_PER_SECOND, NS_PER_US, EventKind


def test_event_at_current_time_fires() -> None:
    queue = EventQueue()
    fired = []
    queue.schedule(0, fired.append, "a")

    assert queue.run_until(0) == 1
    assert fired == ["a"]


def test_identical_fire_times_keep_insertion_order() -> None:
    queue = EventQueue()
    fired = []
    for label in ["first", "second", "third"]:
        queue.schedule(100, fired.append, label)

    queue.run_until(100)

    assert fired == ["first", "second", "third"]


def test_schedule_in_the_past_is_rejected() -> None:
    queue = EventQueue()
    queue.run_until(10 * NS_PER_US)

    with pytest.raises(SchedulingError):
        queue.schedule(5 * NS_PER_US, lambda: None)


def test_cancel_pending_event() -> None:
    queue = EventQueue()
    fired = []
    handle = queue.schedule(50, fired.append, "rto", kind=EventKind.RTO_EXPIRY)

    assert queue.cancel(handle) is True
    assert queue.cancel(handle) is False
    queue.run_until(100)

    assert fired == []
    assert not handle.pending


def test_cancel_after_fire_returns_false() -> None:
    queue = EventQueue()
    handle = queue.schedule(1, lambda: None)
    queue.run_until(1)

    assert queue.cancel(handle) is False


def test_cancel_none_handle() -> None:
    assert EventQueue().cancel(None) is False


def test_run_until_on_empty_queue_moves_clock() -> None:
    queue = EventQueue()

    assert queue.run_until(10 * NS_PER_SECOND) == 0
    assert queue.now == 10 * NS_PER_SECOND


def test_run_until_fires_only_due_events() -> None:
    queue = EventQueue()
    for seconds in (1, 2, 3):
        queue.schedule(seconds * NS_PER_SECOND, lambda: None)

    assert queue.run_until(2 * NS_PER_SECOND) == 2
    assert queue.now == 2 * NS_PER_SECOND
    assert len(list(queue.pending())) == 1


def test_run_until_behind_clock_is_rejected() -> None:
    queue = EventQueue()
    queue.run_until(100)

    with pytest.raises(SchedulingError):
        queue.run_until(50)


def test_events_scheduled_while_running_fire_in_time_order() -> None:
    queue = EventQueue()
    times = []

    def chain(remaining: int) -> None:
        times.append(queue.now)
        if remaining:
            queue.schedule_in(7, chain, remaining - 1)

    queue.schedule(0, chain, 3)
    queue.run_until(1000)

    assert times == [0, 7, 14, 21]
    assert queue.fired_total == 4


def test_pending_filters_by_kind() -> None:
    queue = EventQueue()
    queue.schedule(5, lambda: None, kind=EventKind.CELL_ARRIVAL)
    queue.schedule(5, lambda: None, kind=EventKind.RTO_EXPIRY)
    cancelled = queue.schedule(6, lambda: None, kind=EventKind.CELL_ARRIVAL)
    queue.cancel(cancelled)

    assert len(list(queue.pending(EventKind.CELL_ARRIVAL))) == 1
    assert len(list(queue.pending())) == 2


def test_identical_runs_fire_identical_counts() -> None:
    def build() -> EventQueue:
        queue = EventQueue()
        for i in range(50):
            queue.schedule((i * 37) % 101, lambda: None)
        return queue

    assert build().run_until(100) == build().run_until(100)


def test_link_clock_accumulates_exactly() -> None:
    link = LinkClock(155_520_000)

    assert link.transmit(0) == 2727
    for _ in range(999):
        finish = link.transmit(0)

    # 1000 * 424e9 / 155.52e6 = 2726337.45 ns, rounded up once rather than per cell
    assert finish == 2_726_338
    assert link.busy_until_ns() == 2_726_338


def test_link_clock_idle_gap_restarts_at_now() -> None:
    link = LinkClock(424_000_000)  # 1000 ns per cell

    assert link.transmit(0) == 1000
    assert link.transmit(5000) == 6000
    assert link.transmit(5000) == 7000


def test_link_clock_rejects_non_positive_rate() -> None:
    with pytest.raises(ValueError):
        LinkClock(0)


def test_transmitter_schedules_arrival_after_propagation(make_cell) -> None:
    queue = EventQueue()
    arrived = []
    nic = Transmitter("nic", queue, 424_000_000, 5 * NS_PER_US, arrived.append)

    first = nic.send(make_cell(index=0))
    second = nic.send(make_cell(index=1))
    queue.run_until(first)

    assert first == 1000 + 5 * NS_PER_US
    assert second == first + 1000
    assert [c.index_in_frame for c in arrived] == [0]
    assert nic.cells_sent == 2
