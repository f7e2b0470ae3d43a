"""Parameter sweeps over scenario grids, rendered as efficiency/fairness tables."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

from loguru import logger

from domain.exceptions import ScenarioError, SweepError
from domain.metrics import RunResult
from domain.models import PolicyKind, TcpFlavor
from domain.parsers.presets import PRESETS, PresetName
from domain.parsers.scenario_parser import ScenarioConfig, load_scenario
from domain.switch import DropPolicy
from services.simulation import run_scenario


METRICS = ("efficiency", "fairness")
FAILED = "failed"

_FLAVOR_NAMES = {
    TcpFlavor.SACK: "SACK",
    TcpFlavor.RENO: "Reno",
    TcpFlavor.NEW_RENO: "NewReno",
    TcpFlavor.VANILLA: "Vanilla",
}

_TABLE_POLICIES = (PolicyKind.TAIL_DROP, PolicyKind.EPD, PolicyKind.SELECTIVE_DROP)
_TABLE_FLAVORS = (TcpFlavor.SACK, TcpFlavor.VANILLA, TcpFlavor.RENO)


@dataclass(frozen=True)
class SweepCell:
    preset: PresetName
    flavor: TcpFlavor
    policy: PolicyKind
    n_sources: int
    buffer: int

    def scenario_text(self) -> str:
        return (
            f"preset={self.preset.value} n={self.n_sources} buffer={self.buffer} "
            f"tcp={self.flavor.value} policy={self.policy.value}"
        )


@dataclass(frozen=True)
class SweepSpec:
    """Cross product of presets, flavors, policies, source counts and buffers."""

    presets: tuple[PresetName, ...]
    flavors: tuple[TcpFlavor, ...]
    policies: tuple[PolicyKind, ...]
    n_values: tuple[int, ...]
    buffers: tuple[int, ...] = ()
    metrics: tuple[str, ...] = METRICS
    overrides: Mapping[str, str] = field(default_factory=dict)
    name: str = "sweep"

    def __post_init__(self) -> None:
        for label, values in [
            ("presets", self.presets),
            ("flavors", self.flavors),
            ("policies", self.policies),
            ("n_values", self.n_values),
            ("metrics", self.metrics),
        ]:
            if not values:
                raise SweepError(f"Sweep has an empty '{label}' list")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise SweepError(f"Unknown metric(s) {unknown}; expected {list(METRICS)}")
        if any(n < 1 for n in self.n_values):
            raise SweepError(f"Source counts must be positive, got {list(self.n_values)}")

    def buffers_for(self, preset: PresetName) -> tuple[int, ...]:
        return self.buffers or PRESETS[preset].buffers

    def cells(self) -> list[SweepCell]:
        """Grid cells in table order: preset, flavor, n, K, then policy."""
        return [
            SweepCell(preset, flavor, policy, n, k)
            for preset in self.presets
            for flavor in self.flavors
            for n in self.n_values
            for k in self.buffers_for(preset)
            for policy in self.policies
        ]

    def configs(self) -> list[ScenarioConfig]:
        configs = []
        for cell in self.cells():
            try:
                configs.append(load_scenario(cell.scenario_text(), self.overrides))
            except ScenarioError as e:
                raise SweepError(f"Sweep cell '{cell.scenario_text()}' is invalid: {e}") from e
        return configs


def table_spec(number: int, overrides: Optional[Mapping[str, str]] = None) -> SweepSpec:
    """Predefined grids: 1/2 LAN+WAN efficiency/fairness, 3/4 satellite."""
    overrides = dict(overrides or {})
    if number in (1, 2):
        return SweepSpec(
            presets=(PresetName.LAN, PresetName.WAN),
            flavors=_TABLE_FLAVORS,
            policies=_TABLE_POLICIES,
            n_values=(5, 15),
            metrics=("efficiency",) if number == 1 else ("fairness",),
            overrides=overrides,
            name=f"table{number}",
        )
    if number in (3, 4):
        return SweepSpec(
            presets=(PresetName.GEO,),
            flavors=_TABLE_FLAVORS,
            policies=_TABLE_POLICIES,
            n_values=(5,),
            metrics=("efficiency",) if number == 3 else ("fairness",),
            overrides=overrides,
            name=f"table{number}",
        )
    raise SweepError(f"No table {number}; expected 1, 2, 3 or 4")


@dataclass
class CellOutcome:
    config: ScenarioConfig
    result: Optional[RunResult] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.result is None


def _run_cell(config: ScenarioConfig) -> RunResult:
    return run_scenario(config)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[CellOutcome]:
    """
    Run every cell; a failing cell is recorded and the sweep continues.

    Outcomes are returned in grid order whatever the completion order.
    """
    configs = spec.configs()
    logger.info(f"Sweep '{spec.name}': {len(configs)} cells on {workers} worker(s)")
    outcomes = [CellOutcome(config) for config in configs]

    if workers <= 1:
        for outcome in outcomes:
            _finish(outcome, lambda c=outcome.config: _run_cell(c))
        return outcomes

    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_cell, outcome.config) for outcome in outcomes]
        for outcome, future in zip(outcomes, futures):
            _finish(outcome, future.result)
    return outcomes


def _finish(outcome: CellOutcome, compute) -> None:
    config = outcome.config
    label = (
        f"{config.preset.value} n={config.n_sources} K={config.buffer} "
        f"{config.flavor.value}/{config.policy.value}"
    )
    try:
        outcome.result = compute()
    except Exception as e:
        outcome.error = f"{type(e).__name__}: {e}"
        logger.warning(f"Sweep cell {label} failed: {outcome.error}")
        return
    logger.info(f"Sweep cell {label} done")


# ---------------------------------------------------------------------- tables


def _policy_label(kind: PolicyKind) -> str:
    return DropPolicy(kind).label


def format_table(spec: SweepSpec, outcomes: list[CellOutcome], metric: str) -> str:
    """
    Aligned text table: one row per (preset, flavor, n, K), one column per policy,
    and a column-average row closing each (preset, flavor) group.
    """
    if metric not in METRICS:
        raise SweepError(f"Unknown metric '{metric}'")
    values: dict[tuple, Optional[float]] = {}
    for outcome in outcomes:
        c = outcome.config
        key = (c.preset, c.flavor, c.n_sources, c.buffer, c.policy)
        values[key] = None if outcome.failed else getattr(outcome.result, metric)

    header = ["Configuration", "TCP", "Num of Srcs", "Buffer (cells)"]
    header += [_policy_label(p) for p in spec.policies]
    rows: list[list[str]] = []

    for preset in spec.presets:
        for flavor in spec.flavors:
            sums = [0.0] * len(spec.policies)
            counts = [0] * len(spec.policies)
            for n in spec.n_values:
                for k in spec.buffers_for(preset):
                    row = [preset.value, _FLAVOR_NAMES[flavor], str(n), f"{k:,}"]
                    for i, policy in enumerate(spec.policies):
                        value = values.get((preset, flavor, n, k, policy))
                        if value is None:
                            row.append(FAILED)
                        else:
                            row.append(f"{value:.2f}")
                            sums[i] += value
                            counts[i] += 1
                    rows.append(row)
            average = [f"{_FLAVOR_NAMES[flavor]} Column Average", "", "", ""]
            average += [f"{s / c:.2f}" if c else FAILED for s, c in zip(sums, counts)]
            rows.append(average)

    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    title = f"{spec.name}: {metric}"
    lines = [title, "  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    return "\n".join(lines) + "\n"


def machine_rows(outcomes: list[CellOutcome]) -> list[str]:
    """One row per cell; failed cells carry `failed` in the metric columns."""
    rows = []
    for outcome in outcomes:
        if outcome.result is not None:
            rows.append(outcome.result.machine_row())
        else:
            c = outcome.config
            rows.append(
                f"{c.preset.value},{c.n_sources},{c.buffer},{c.flavor.value},"
                f"{c.policy.value},{FAILED},{FAILED},{FAILED}"
            )
    return rows
