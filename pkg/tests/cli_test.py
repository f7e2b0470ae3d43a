import json
from unittest.mock import MagicMock, patch

import pytest

from cli.app import create_parser, main
from cli.commands.options import parse_assignments
from cli.commands.run import run_command
from cli.exceptions import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_INVARIANT,
    EXIT_OK,
    EXIT_STORE,
    exception_to_exit_code,
)
from domain.exceptions import (
    InvariantViolation,
    ProtocolError,
    ResultStoreError,
    ScenarioError,
    SweepError,
    UbrSimError,
)
from services.checks import CheckResult

QUICK = ["--duration", "0.02", "--rate-scale", "10"]


@pytest.mark.parametrize(
    "exc, code",
    [
        (ScenarioError("bad", key="n", line=2), EXIT_CONFIG),
        (SweepError("empty"), EXIT_CONFIG),
        (InvariantViolation("x"), EXIT_INVARIANT),
        (ProtocolError("x"), EXIT_INVARIANT),
        (ResultStoreError("disk"), EXIT_STORE),
        (UbrSimError("other"), EXIT_FAILURE),
        (RuntimeError("boom"), EXIT_FAILURE),
    ],
)
def test_exception_to_exit_code(exc, code) -> None:
    report = exception_to_exit_code(exc)

    assert report.exit_code == code
    assert report.error_type == type(exc).__name__


def test_scenario_error_report_carries_location() -> None:
    report = exception_to_exit_code(ScenarioError("bad", key="n", line=2))

    assert (report.key, report.line) == ("n", 2)


def test_parse_assignments() -> None:
    assert parse_assignments(["R=0.8", "Z=0.5"]) == {"R": "0.8", "Z": "0.5"}
    with pytest.raises(ScenarioError):
        parse_assignments(["R"])


def test_presets_command(capsys) -> None:
    assert main(["presets"]) == EXIT_OK

    out = capsys.readouterr().out
    assert "LAN" in out and "WAN" in out and "GEO" in out


def test_presets_command_json(capsys) -> None:
    assert main(["presets", "--json"]) == EXIT_OK

    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["name"] for r in records] == ["LAN", "WAN", "GEO"]
    assert records[1]["rtt_ns"] == 30_000_000


def test_run_writes_outputs(tmp_path, capsys) -> None:
    code = main(
        ["run", "--preset", "LAN", "--n", "2", *QUICK, "--output-dir", str(tmp_path),
         "--trace", "cwnd", "--drops", "--name", "quick"]
    )

    assert code == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "preset,n,K,flavor,policy,efficiency,fairness,timeouts"
    assert out[1].startswith("LAN,2,1000,sack,tail_drop,")
    record = json.loads((tmp_path / "quick.json").read_text())
    assert record["n_sources"] == 2
    assert len(record["sources"]) == 2
    assert (tmp_path / "quick.csv").exists()
    assert (tmp_path / "quick.trace.csv").read_text().startswith("time_ns,series,value")
    assert (tmp_path / "quick.drops.csv").exists()


def test_run_reads_scenario_file_and_output_dir_from_env(tmp_path, monkeypatch) -> None:
    scenario = tmp_path / "two.scn"
    scenario.write_text("preset=LAN  # two sources\nn=2\ntcp=newreno\n")
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path / "out"))

    assert main(["run", str(scenario), *QUICK]) == EXIT_OK

    assert (tmp_path / "out" / "LAN-n2-K1000-newreno-tail_drop.json").exists()


def test_run_with_bad_policy_reports_config_error(capsys) -> None:
    code = main(["run", "--preset", "LAN", "--policy", "red"])

    assert code == EXIT_CONFIG
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["key"] == "policy"
    assert report["error_type"] == "ScenarioError"


def test_run_with_missing_scenario_file(tmp_path) -> None:
    assert main(["run", str(tmp_path / "missing.scn")]) == EXIT_CONFIG


def test_run_with_unwritable_output(tmp_path) -> None:
    blocker = tmp_path / "file"
    blocker.write_text("")

    assert main(["run", "--preset", "LAN", *QUICK, "--output-dir", str(blocker)]) == EXIT_STORE


def test_run_uses_injected_store() -> None:
    args = create_parser().parse_args(["run", "--preset", "LAN", *QUICK])
    store = MagicMock()

    assert run_command(args, store=store) == EXIT_OK
    store.write_record.assert_called_once()
    store.write_machine_rows.assert_called_once()
    store.write_trace.assert_not_called()


def test_sweep_writes_tables(tmp_path, capsys) -> None:
    code = main(
        ["sweep", "--preset", "LAN", "--tcp", "sack", "--policy", "ubr", "epd", "--n", "1",
         "--buffer", "1000", *QUICK, "--output-dir", str(tmp_path), "--name", "mini"]
    )

    assert code == EXIT_OK
    assert "mini: efficiency" in capsys.readouterr().out
    assert (tmp_path / "mini.efficiency.txt").exists()
    assert (tmp_path / "mini.fairness.txt").exists()
    rows = (tmp_path / "mini.csv").read_text().splitlines()
    assert len(rows) == 3
    assert (tmp_path / "mini" / "LAN-n1-K1000-sack-epd.json").exists()


def test_sweep_with_unknown_flavor() -> None:
    assert main(["sweep", "--tcp", "cubic"]) == EXIT_CONFIG


def test_check_command_exit_codes(capsys) -> None:
    passing = [CheckResult("a", True, "fine")]
    failing = [CheckResult("a", True), CheckResult("b", False, "off by one")]

    with patch("cli.commands.check.run_checks", return_value=passing):
        assert main(["check", "--samples", "10"]) == EXIT_OK
    with patch("cli.commands.check.run_checks", return_value=failing):
        assert main(["check", "--json"]) == EXIT_INVARIANT

    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("ok")
    assert json.loads(out[-1]) == {"name": "b", "passed": False, "detail": "off by one"}
