"""Scenario-key flags shared by the run command."""

import argparse

from domain.exceptions import ScenarioError
from domain.parsers.scenario_parser import ScenarioParser


SCENARIO_KEYS = ["preset", *ScenarioParser.KEYS]


def _dest(key: str) -> str:
    return f"scenario_{key}"


def add_scenario_options(parser: argparse.ArgumentParser) -> None:
    """One `--key VALUE` flag per scenario key; underscores also accept hyphens."""
    group = parser.add_argument_group("scenario keys (override the scenario file)")
    for key in SCENARIO_KEYS:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        group.add_argument(*flags, dest=_dest(key), metavar="VALUE", default=None)


def collect_overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides = {}
    for key in SCENARIO_KEYS:
        value = getattr(args, _dest(key), None)
        if value is not None:
            overrides[key] = str(value)
    return overrides


def parse_assignments(pairs: list[str] | None) -> dict[str, str]:
    """`KEY=VALUE` strings from repeated `--set` flags."""
    result = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ScenarioError("expected KEY=VALUE", key=pair)
        result[key] = value
    return result
