import argparse
from typing import Optional

from loguru import logger

from cli.commands.options import parse_assignments
from cli.commands.run import run_stem
from cli.exceptions import EXIT_FAILURE, EXIT_OK
from cli.schemas import RunRecord
from config import get_settings
from domain.exceptions import ScenarioError, SweepError
from domain.models import PolicyKind, TcpFlavor
from domain.parsers.presets import PresetName, get_preset
from domain.parsers.scenario_parser import FLAVOR_ALIASES, POLICY_ALIASES
from infrastructure.result_store import ResultStore
from services.sweep import METRICS, SweepSpec, format_table, machine_rows, run_sweep, table_spec


def _lookup(table: dict, names: list[str], what: str) -> tuple:
    values = []
    for name in names:
        try:
            values.append(table[name.lower()])
        except KeyError as e:
            raise SweepError(f"Unknown {what} '{name}'; expected one of {list(table)}") from e
    return tuple(dict.fromkeys(values))


def _presets(names: list[str]) -> tuple[PresetName, ...]:
    try:
        return tuple(get_preset(name).name for name in names)
    except ScenarioError as e:
        raise SweepError(str(e)) from e


def build_spec(args: argparse.Namespace) -> SweepSpec:
    overrides = parse_assignments(args.set)
    if args.rate_scale is not None:
        overrides["rate_scale"] = str(args.rate_scale)
    if args.duration is not None:
        overrides["duration"] = str(args.duration)

    if args.table is not None:
        spec = table_spec(args.table, overrides)
        return spec if args.name is None else _renamed(spec, args.name)

    flavors: tuple[TcpFlavor, ...] = _lookup(FLAVOR_ALIASES, args.tcp or ["sack"], "flavor")
    policies: tuple[PolicyKind, ...] = _lookup(
        POLICY_ALIASES, args.policy or ["ubr", "epd", "sd"], "policy"
    )
    return SweepSpec(
        presets=_presets(args.preset or ["LAN"]),
        flavors=flavors,
        policies=policies,
        n_values=tuple(args.n or [5]),
        buffers=tuple(args.buffer or ()),
        metrics=tuple(args.metric or METRICS),
        overrides=overrides,
        name=args.name or "sweep",
    )


def _renamed(spec: SweepSpec, name: str) -> SweepSpec:
    return SweepSpec(
        presets=spec.presets,
        flavors=spec.flavors,
        policies=spec.policies,
        n_values=spec.n_values,
        buffers=spec.buffers,
        metrics=spec.metrics,
        overrides=spec.overrides,
        name=name,
    )


def sweep_command(args: argparse.Namespace, store: Optional[ResultStore] = None) -> int:
    settings = get_settings()
    spec = build_spec(args)
    workers = args.workers or settings.sweep_workers
    outcomes = run_sweep(spec, workers=workers)

    store = store or ResultStore(args.output_dir)
    for outcome in outcomes:
        if outcome.result is not None:
            stem = f"{spec.name}/{run_stem(outcome.config)}"
            store.write_record(stem, RunRecord.from_result(outcome.result))
    store.write_machine_rows(spec.name, machine_rows(outcomes))
    for metric in spec.metrics:
        table = format_table(spec, outcomes, metric)
        store.write_table(f"{spec.name}.{metric}", table)
        print(table)

    failed = sum(1 for o in outcomes if o.failed)
    if failed:
        logger.warning(f"Sweep '{spec.name}': {failed} of {len(outcomes)} cells failed")
        return EXIT_FAILURE
    return EXIT_OK
