"""Command-line entry point: run, sweep, presets, check."""

import argparse
import sys
from typing import Optional, Sequence

from loguru import logger

from cli.commands import check_command, presets_command, run_command, sweep_command
from cli.commands.options import add_scenario_options
from cli.commands.run import TRACE_KINDS
from cli.exceptions import exception_to_exit_code
from config import get_settings
from domain.utils.logger import setup_logger


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ubr-sim",
        description="Discrete-event simulation of TCP flavors over ATM-UBR switches",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one scenario")
    run.add_argument("scenario", nargs="?", help="Scenario file (key=value per line)")
    run.add_argument(
        "--trace", action="append", choices=TRACE_KINDS, help="Write a trace file (repeatable)"
    )
    run.add_argument("--drops", action="store_true", help="Write the per-cell drop log")
    run.add_argument("--name", help="Output file stem")
    run.add_argument("--output-dir", help="Output directory (default: OUTPUT_DIR)")
    add_scenario_options(run)
    run.set_defaults(handler=run_command)

    sweep = sub.add_parser("sweep", help="Run a grid of scenarios and tabulate")
    sweep.add_argument("--table", type=int, choices=(1, 2, 3, 4), help="Predefined table grid")
    sweep.add_argument("--preset", nargs="+", help="Presets (default LAN)")
    sweep.add_argument("--tcp", nargs="+", help="TCP flavors (default sack)")
    sweep.add_argument("--policy", nargs="+", help="Drop policies (default ubr epd sd)")
    sweep.add_argument("--n", nargs="+", type=int, help="Source counts (default 5)")
    sweep.add_argument("--buffer", nargs="+", type=int, help="Buffers in cells (default: preset's)")
    sweep.add_argument("--metric", nargs="+", choices=("efficiency", "fairness"))
    sweep.add_argument("--rate-scale", type=int, help="Divide every link rate by this factor")
    sweep.add_argument("--duration", help="Simulated seconds per cell")
    sweep.add_argument("--set", action="append", metavar="KEY=VALUE", help="Any scenario key")
    sweep.add_argument("--workers", type=int, help="Worker processes (default: SWEEP_WORKERS)")
    sweep.add_argument("--name", help="Output file stem")
    sweep.add_argument("--output-dir", help="Output directory (default: OUTPUT_DIR)")
    sweep.set_defaults(handler=sweep_command)

    presets = sub.add_parser("presets", help="Show preset parameters")
    presets.add_argument("--json", action="store_true", help="One JSON object per preset")
    presets.set_defaults(handler=presets_command)

    check = sub.add_parser("check", help="Run the self-check suite")
    check.add_argument("--samples", type=int, default=1_000_000, help="Drop-test oracle tuples")
    check.add_argument("--json", action="store_true", help="One JSON object per check")
    check.set_defaults(handler=check_command)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = create_parser()
    args = parser.parse_args(argv)

    settings = get_settings()
    setup_logger(settings.log_level, settings.log_file, verbose=args.verbose)
    logger.debug(f"Command: {args.command}")

    try:
        return args.handler(args)
    except Exception as e:
        report = exception_to_exit_code(e)
        print(report.model_dump_json(), file=sys.stderr)
        return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
