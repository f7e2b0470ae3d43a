from cli.commands.check import check_command
from cli.commands.presets import presets_command
from cli.commands.run import run_command
from cli.commands.sweep import sweep_command

__all__ = ["check_command", "presets_command", "run_command", "sweep_command"]
