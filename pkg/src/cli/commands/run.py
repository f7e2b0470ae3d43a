import argparse
from pathlib import Path
from typing import Optional

from loguru import logger

from cli.commands.options import collect_overrides
from cli.exceptions import EXIT_OK
from cli.schemas import RunRecord
from config import get_settings
from domain.exceptions import ScenarioError
from domain.metrics import MACHINE_HEADER
from domain.parsers.scenario_parser import ScenarioConfig, load_scenario
from infrastructure.result_store import ResultStore
from services.simulation import build


TRACE_KINDS = ("cwnd", "queue")


def run_stem(config: ScenarioConfig) -> str:
    return (
        f"{config.preset.value}-n{config.n_sources}-K{config.buffer}-"
        f"{config.flavor.value}-{config.policy.value}"
    )


def read_scenario_file(path: Optional[str]) -> str:
    if path is None:
        return ""
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}", key="scenario") from e


def run_command(args: argparse.Namespace, store: Optional[ResultStore] = None) -> int:
    settings = get_settings()
    text = read_scenario_file(args.scenario)
    config = load_scenario(text, collect_overrides(args))

    traces = set(args.trace or [])
    record_drops = args.drops or settings.record_drops
    network = build(
        config,
        trace_period_ms=settings.trace_period_ms if traces else None,
        trace_senders="cwnd" in traces,
        trace_queue="queue" in traces,
        record_drops=record_drops,
    )
    result = network.run()

    store = store or ResultStore(args.output_dir)
    stem = args.name or run_stem(config)
    store.write_record(stem, RunRecord.from_result(result))
    store.write_machine_rows(stem, [result.machine_row()])
    if traces:
        store.write_trace(stem, result.traces)
    if record_drops:
        store.write_drops(stem, result.drop_log)
    logger.info(f"Results written under {store.output_dir} as {stem}.*")

    print(MACHINE_HEADER)
    print(result.machine_row())
    return EXIT_OK
