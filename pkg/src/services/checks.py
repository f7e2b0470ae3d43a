"""Self-check suite run by `ubr-sim check`."""

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from loguru import logger

from domain.exceptions import InvariantViolation, UbrSimError
from domain.framing import cells_per_segment, max_goodput
from domain.metrics import fairness, sack_recovery_bound
from domain.models import LINK_RATE_BPS, NS_PER_MS, SenderLogEntry, TcpFlavor
from domain.parsers.presets import PresetName
from domain.parsers.scenario_parser import ScenarioConfig, load_scenario
from domain.switch import fba_test, selective_drop_test
from services.simulation import build, run_scenario


SCRIPTED_BASE = "preset=WAN n=1 buffer=12000 window=8192 duration=3 policy=tail_drop"
BASELINE_TEXT = "preset=WAN n=1 buffer=36000 tcp=sack policy=tail_drop rate_scale=10"
DETERMINISM_TEXT = "preset=LAN n=3 buffer=1000 tcp=reno policy=epd duration=0.2 rate_scale=10"
RTT_MARGIN_NS = 10 * NS_PER_MS


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RecoverySpan:
    """Timing of one loss episode as seen in a sender's log."""

    fast_retransmit_ns: int
    last_retransmit_ns: int
    exit_ns: Optional[int]
    retransmits: int


def recovery_span(log: Iterable[SenderLogEntry]) -> Optional[RecoverySpan]:
    """First fast retransmit and the retransmissions and exit of that episode."""
    entries = list(log)
    start = next((e for e in entries if e.kind == "fast_retransmit"), None)
    if start is None:
        return None
    last = start.time_ns
    count = 1
    exit_ns = None
    for entry in entries[entries.index(start) + 1 :]:
        if entry.kind == "retransmit":
            last = entry.time_ns
            count += 1
        elif entry.kind in ("recovery_exit", "timeout"):
            exit_ns = entry.time_ns
            break
    return RecoverySpan(start.time_ns, last, exit_ns, count)


def scripted_scenario(flavor: TcpFlavor, losses: Iterable[int]) -> ScenarioConfig:
    """Window-limited WAN connection (16 segments) losing the listed segments once."""
    lost = ",".join(str(i) for i in losses)
    return load_scenario(f"{SCRIPTED_BASE} tcp={flavor.value} forced_losses={lost}")


def drop_oracle_disagreements(samples: int, seed: int = 0) -> int:
    """Compare the integer drop tests against direct rational evaluation."""
    rng = random.Random(seed)
    disagreements = 0
    for _ in range(samples):
        capacity = rng.randint(10, 5000)
        r_cells = rng.randint(1, capacity - 1)
        x = rng.randint(0, capacity)
        na = rng.randint(1, 64)
        yi = rng.randint(0, x)
        z = Fraction(rng.randint(1, 100), 100)

        sd_expected = x > r_cells and Fraction(yi * na, x) > z
        fba_expected = x > r_cells and Fraction(yi * na, x) > z * Fraction(
            capacity - r_cells, x - r_cells
        )
        if selective_drop_test(x, r_cells, yi, na, z) != sd_expected:
            disagreements += 1
        if fba_test(x, capacity, r_cells, yi, na, z) != fba_expected:
            disagreements += 1
    return disagreements


def check_goodput_ceiling() -> CheckResult:
    goodput = max_goodput(LINK_RATE_BPS, 512)
    ratio = goodput / LINK_RATE_BPS
    ok = abs(goodput - 125.2e6) <= 0.05e6 and abs(ratio - 0.805) <= 0.001
    return CheckResult("goodput ceiling", ok, f"{goodput / 1e6:.3f} Mbps, ratio {ratio:.4f}")


def check_fairness_examples() -> CheckResult:
    cases = [((1, 1, 1, 1, 1), 1.0), ((1, 0, 0, 0, 0), 0.2), ((0.9, 1.1), 4 / 4.04)]
    bad = [x for x, want in cases if abs(fairness(x) - want) > 1e-9]
    return CheckResult("fairness index", not bad, f"mismatches: {bad}" if bad else "3 examples")


def check_drop_oracle(samples: int) -> CheckResult:
    bad = drop_oracle_disagreements(samples)
    return CheckResult("drop test oracle", bad == 0, f"{bad} disagreements in {samples} tuples")


def check_recovery_bound() -> CheckResult:
    cases = [(Fraction(4), 1), (Fraction(8, 3), 2), (Fraction(5, 2), 3)]
    bad = [(str(n), want) for n, want in cases if sack_recovery_bound(n) != want]
    detail = f"mismatches: {bad}" if bad else "3 examples"
    return CheckResult("SACK recovery bound", not bad, detail)


def check_newreno_recovery() -> CheckResult:
    config = scripted_scenario(TcpFlavor.NEW_RENO, [100, 101, 102])
    source = run_scenario(config).sources[0]
    span = recovery_span(source.log)
    rtt = config.rtt_ns
    ok = (
        span is not None
        and source.counters.timeouts == 0
        and source.counters.retransmissions == 3
        and span.exit_ns is not None
        and span.exit_ns - span.fast_retransmit_ns <= 4 * rtt
    )
    detail = (
        f"retransmissions {source.counters.retransmissions}, "
        f"timeouts {source.counters.timeouts}"
    )
    return CheckResult("New Reno three-loss recovery", ok, detail)


def check_sack_recovery() -> CheckResult:
    config = scripted_scenario(TcpFlavor.SACK, [100, 101, 102, 103])
    source = run_scenario(config).sources[0]
    span = recovery_span(source.log)
    ok = (
        span is not None
        and source.counters.timeouts == 0
        and span.retransmits == 4
        and span.last_retransmit_ns - span.fast_retransmit_ns <= config.rtt_ns
    )
    return CheckResult(
        "SACK quarter-window recovery",
        ok,
        f"retransmits {span.retransmits if span else 0}, timeouts {source.counters.timeouts}",
    )


@dataclass
class RttMeasurement:
    preset: PresetName
    measured_ns: int
    expected_ns: int
    cell_time_ns: float

    @property
    def ok(self) -> bool:
        return abs(self.measured_ns - self.expected_ns) <= self.cell_time_ns


def measure_round_trip(preset: PresetName) -> RttMeasurement:
    """
    Propagation round trip seen by the first timed segment on an idle network.

    The first segment and its ACK each cross three hops, so the sample carries
    one frame's cells plus two cell times of hop-by-hop forwarding per direction.
    That serialization is subtracted before comparing against the preset delays.
    """
    config = load_scenario(f"preset={preset.value} n=1")
    config = config.with_overrides(duration_ns=config.rtt_ns + RTT_MARGIN_NS)
    network = build(config)
    network.run()

    sample = network.senders[0].rto.first_sample_ns
    if sample is None:
        raise InvariantViolation(f"{preset.value}: no round-trip sample within the run")
    cell_time = network.sources[0].nic.link.cell_time_ns
    cells = cells_per_segment(config.mss) + cells_per_segment(0) + 4
    return RttMeasurement(preset, round(sample - cells * cell_time), config.rtt_ns, cell_time)


def check_round_trips() -> CheckResult:
    measurements = [measure_round_trip(p) for p in PresetName]
    ok = all(m.ok for m in measurements)
    detail = ", ".join(f"{m.preset.value} {m.measured_ns / 1e6:.3f} ms" for m in measurements)
    return CheckResult("propagation round trip", ok, detail)


def check_baseline() -> CheckResult:
    result = run_scenario(load_scenario(BASELINE_TEXT))
    ok = result.efficiency >= 0.95 and abs(result.fairness - 1.0) < 1e-12
    detail = f"efficiency {result.efficiency:.4f} fairness {result.fairness:.4f}"
    return CheckResult("loss-free baseline", ok, detail)


def check_determinism() -> CheckResult:
    config = load_scenario(DETERMINISM_TEXT)
    first = run_scenario(config)
    second = run_scenario(config)
    ok = (
        first.machine_row() == second.machine_row()
        and first.delivered_bytes == second.delivered_bytes
        and first.events_fired == second.events_fired
    )
    return CheckResult("determinism", ok, first.machine_row())


def run_checks(oracle_samples: int = 1_000_000) -> list[CheckResult]:
    """Run every check; audit failures inside simulations count as failed checks."""
    checks: list[tuple[str, Callable[[], CheckResult]]] = [
        ("goodput ceiling", check_goodput_ceiling),
        ("fairness index", check_fairness_examples),
        ("drop test oracle", lambda: check_drop_oracle(oracle_samples)),
        ("SACK recovery bound", check_recovery_bound),
        ("New Reno three-loss recovery", check_newreno_recovery),
        ("SACK quarter-window recovery", check_sack_recovery),
        ("propagation round trip", check_round_trips),
        ("loss-free baseline", check_baseline),
        ("determinism", check_determinism),
    ]
    results = []
    for name, check in checks:
        try:
            result = check()
        except UbrSimError as e:
            result = CheckResult(name, False, f"{type(e).__name__}: {e}")
        level = "INFO" if result.passed else "WARNING"
        logger.log(level, f"check {name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
        results.append(result)
    return results
