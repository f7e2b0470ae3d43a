from unittest.mock import MagicMock

import pytest

from domain.exceptions import InvariantViolation
from domain.framing import FrameCounter, encapsulate
from domain.metrics import series
from domain.models import NS_PER_US, DropReason, PolicyKind, TcpFlavor, TcpSegment
from domain.parsers.scenario_parser import load_scenario
from services.checks import BASELINE_TEXT, recovery_span, scripted_scenario
from services.simulation import DestinationHost, Network, build, run_scenario

SMALL_LAN = "preset=LAN n=3 buffer=1000 duration=0.2 rate_scale=10"
LAN_BASELINE = "preset=LAN n=1 buffer=3000 tcp=sack policy=tail_drop duration=0.5 rate_scale=10"


def test_network_topology(make_scenario) -> None:
    network = build(make_scenario("preset=LAN n=4"))

    assert len(network.senders) == 4
    assert len(network.receivers) == 4
    assert [p.name for p in network.ports[:2]] == ["A->B", "B->A"]
    assert len(network.ports) == 2 + 2 * 4
    assert network.bottleneck.scripted is None


@pytest.mark.parametrize("flavor", list(TcpFlavor))
@pytest.mark.parametrize("policy", list(PolicyKind))
def test_every_combination_runs_and_audits(make_scenario, flavor, policy) -> None:
    config = make_scenario(SMALL_LAN, tcp=flavor.value, policy=policy.value)

    result = run_scenario(config)

    assert 0 < result.efficiency <= 1.01
    assert 0 < result.fairness <= 1.0
    assert all(s.cells_in >= s.cells_delivered + s.cells_dropped for s in result.sources)


def test_congested_run_drops_and_stays_consistent(make_scenario) -> None:
    result = run_scenario(make_scenario(SMALL_LAN, tcp="reno", policy="epd"))

    assert sum(result.drops_by_reason.values()) > 0
    assert result.max_occupancy <= 1000
    assert result.fast_retransmits + result.timeouts > 0


def test_drop_log_matches_drop_counts(make_scenario) -> None:
    config = make_scenario(SMALL_LAN, policy="tail_drop")

    result = run_scenario(config, record_drops=True)

    assert len(result.drop_log) == sum(s.cells_dropped for s in result.sources)
    assert [r.time_ns for r in result.drop_log] == sorted(r.time_ns for r in result.drop_log)
    assert {r.reason for r in result.drop_log} <= set(DropReason)


def test_trace_rows_are_collected(make_scenario) -> None:
    config = make_scenario("preset=LAN n=1 duration=0.05 rate_scale=10")

    result = run_scenario(config, trace_period_ms=10)

    assert len(series(result.traces, "queue.X")) == 6
    assert series(result.traces, "cwnd.0")[0] == (0, 512)


def test_staggered_starts(make_scenario) -> None:
    config = make_scenario("preset=LAN n=2 duration=0.05 rate_scale=10 stagger_us=2000")

    result = run_scenario(config)

    assert [s.start_ns for s in result.sources] == [0, 2000 * NS_PER_US]
    assert all(s.delivered_bytes > 0 for s in result.sources)


def test_loss_free_lan_baseline() -> None:
    result = run_scenario(load_scenario(LAN_BASELINE))

    assert result.efficiency >= 0.95
    assert result.fairness == pytest.approx(1.0)
    assert result.timeouts == 0
    assert sum(result.drops_by_reason.values()) == 0


def test_identical_configs_give_identical_results(make_scenario) -> None:
    config = make_scenario(SMALL_LAN, tcp="reno", policy="epd")

    first = run_scenario(config)
    second = run_scenario(config)

    assert first.machine_row() == second.machine_row()
    assert first.delivered_bytes == second.delivered_bytes
    assert first.events_fired == second.events_fired


# ---------------------------------------------------------------- scripted losses


def test_newreno_recovers_three_losses_without_timeout() -> None:
    config = scripted_scenario(TcpFlavor.NEW_RENO, [100, 101, 102])

    source = run_scenario(config).sources[0]
    span = recovery_span(source.log)

    assert source.counters.timeouts == 0
    assert source.counters.retransmissions == 3
    assert span is not None and span.exit_ns is not None
    assert span.exit_ns - span.fast_retransmit_ns <= 4 * config.rtt_ns


def test_sack_recovers_quarter_window_within_one_rtt() -> None:
    config = scripted_scenario(TcpFlavor.SACK, [100, 101, 102, 103])

    source = run_scenario(config).sources[0]
    span = recovery_span(source.log)

    assert source.counters.timeouts == 0
    assert span is not None
    assert span.retransmits == 4
    assert span.last_retransmit_ns - span.fast_retransmit_ns <= config.rtt_ns


def test_sack_recovers_three_eighths_window_within_two_rtts() -> None:
    config = scripted_scenario(TcpFlavor.SACK, range(100, 106))

    source = run_scenario(config).sources[0]
    span = recovery_span(source.log)

    assert source.counters.timeouts == 0
    assert span is not None
    assert span.retransmits == 6
    assert span.last_retransmit_ns - span.fast_retransmit_ns <= 2 * config.rtt_ns + 1_000_000


@pytest.mark.parametrize("flavor", [TcpFlavor.RENO, TcpFlavor.VANILLA])
def test_older_flavors_time_out_on_three_losses(flavor) -> None:
    source = run_scenario(scripted_scenario(flavor, [100, 101, 102])).sources[0]

    assert source.counters.timeouts >= 1


def test_scripted_losses_are_applied_once() -> None:
    config = scripted_scenario(TcpFlavor.SACK, [100, 101])
    network = build(config)

    network.run()

    assert network.bottleneck.scripted.fired == [100, 101]
    assert network.bottleneck.drops_by_reason[DropReason.SCRIPTED] == 2


def _retransmits_per_rtt(log, rtt_ns):
    """Retransmissions of the first recovery episode, binned by round trip."""
    span = recovery_span(log)
    assert span is not None
    start = span.fast_retransmit_ns
    counts: dict[int, int] = {}
    for entry in log:
        if entry.time_ns < start or entry.kind not in ("fast_retransmit", "retransmit"):
            continue
        if span.exit_ns is not None and entry.time_ns > span.exit_ns:
            break
        rtt = (entry.time_ns - start) // rtt_ns
        counts[rtt] = counts.get(rtt, 0) + 1
    return [counts.get(i, 0) for i in range(max(counts) + 1)]


def test_sack_doubles_retransmissions_after_losing_most_of_a_window() -> None:
    config = scripted_scenario(TcpFlavor.SACK, range(100, 110))

    source = run_scenario(config).sources[0]
    per_rtt = _retransmits_per_rtt(source.log, config.rtt_ns)

    assert source.counters.timeouts == 0
    assert per_rtt == [1, 2, 4, 3]


def test_destination_counts_a_frame_closed_by_the_next_frames_eom() -> None:
    host = DestinationHost(0, MagicMock(), MagicMock(), FrameCounter())
    first = encapsulate(TcpSegment(vc=0, seq=0, payload_len=512), 0).cells
    second = encapsulate(TcpSegment(vc=0, seq=512, payload_len=512), 1).cells

    for cell in [*first[:-1], second[-1]]:
        host.on_cell(cell)

    assert host.frames_lost == 2
    host.receiver.receiver_on_segment.assert_not_called()


def test_sack_audit_accepts_ranges_the_receiver_holds() -> None:
    network = build(scripted_scenario(TcpFlavor.SACK, [100]))
    sender, receiver = network.senders[0], network.receivers[0]
    sender.table.record_sent(512, 1024)
    sender.table.get(512).sacked = True
    receiver.blocks.record_arrival(512, 1024)

    Network.audit_sack(sender, receiver)


def test_sack_audit_rejects_a_range_the_receiver_lacks() -> None:
    network = build(scripted_scenario(TcpFlavor.SACK, [100]))
    sender, receiver = network.senders[0], network.receivers[0]
    sender.table.record_sent(512, 1024)
    sender.table.record_sent(1024, 1536)
    sender.table.get(1024).sacked = True
    receiver.blocks.record_arrival(512, 1024)

    with pytest.raises(InvariantViolation, match=r"\[1024, 1536\)"):
        Network.audit_sack(sender, receiver)


@pytest.mark.slow
@pytest.mark.parametrize("flavor", list(TcpFlavor))
def test_wan_single_source_baseline(make_scenario, flavor) -> None:
    config = make_scenario(BASELINE_TEXT, tcp=flavor.value)

    result = run_scenario(config)

    assert config.duration_ns == 20 * 10**9
    assert result.efficiency >= 0.95
    assert result.fairness == pytest.approx(1.0, abs=1e-12)
    assert result.timeouts == 0
