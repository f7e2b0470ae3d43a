import argparse

from cli.exceptions import EXIT_INVARIANT, EXIT_OK
from cli.schemas import CheckReport
from services.checks import run_checks


def check_command(args: argparse.Namespace) -> int:
    results = run_checks(oracle_samples=args.samples)
    for result in results:
        if args.json:
            report = CheckReport(name=result.name, passed=result.passed, detail=result.detail)
            print(report.model_dump_json())
        else:
            status = "ok" if result.passed else "FAILED"
            print(f"{status:<6} {result.name}: {result.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVARIANT
