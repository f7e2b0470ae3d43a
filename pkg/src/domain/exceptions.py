"""Custom exceptions for ubr-sack-sim."""

from typing import Optional


class UbrSimError(Exception):
    """Base exception for all ubr-sack-sim errors."""

    pass


class SchedulingError(UbrSimError):
    """Event scheduled before the current clock or clock moved backwards."""

    pass


class ScenarioError(UbrSimError):
    """Invalid scenario text, key or value."""

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


class ProtocolError(UbrSimError):
    """TCP state machine received something it can never legally see."""

    pass


class InvariantViolation(UbrSimError):
    """Accounting or integrity audit failed."""

    pass


class SweepError(UbrSimError):
    """Sweep grid is empty or inconsistent."""

    pass


class ResultStoreError(UbrSimError):
    """Failed to write results to the output directory."""

    pass
