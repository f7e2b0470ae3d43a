from services.checks import run_checks
from services.simulation import build, run_scenario
from services.sweep import run_sweep, table_spec

__all__ = ["build", "run_checks", "run_scenario", "run_sweep", "table_spec"]
