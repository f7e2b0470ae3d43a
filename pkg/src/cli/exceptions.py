from loguru import logger

from domain.exceptions import (
    InvariantViolation,
    ProtocolError,
    ResultStoreError,
    ScenarioError,
    SchedulingError,
    SweepError,
    UbrSimError,
)
from cli.schemas import ErrorReport


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_STORE = 4


def exception_to_exit_code(exc: Exception) -> ErrorReport:
    logger.error(f"Command failed: {exc}")

    key = None
    line = None

    if isinstance(exc, ScenarioError):
        exit_code = EXIT_CONFIG
        error_type = "ScenarioError"
        key, line = exc.key, exc.line

    elif isinstance(exc, SweepError):
        exit_code = EXIT_CONFIG
        error_type = "SweepError"

    elif isinstance(exc, (InvariantViolation, ProtocolError, SchedulingError)):
        exit_code = EXIT_INVARIANT
        error_type = type(exc).__name__

    elif isinstance(exc, ResultStoreError):
        exit_code = EXIT_STORE
        error_type = "ResultStoreError"

    elif isinstance(exc, UbrSimError):
        exit_code = EXIT_FAILURE
        error_type = type(exc).__name__

    else:
        logger.exception(f"Unexpected error: {exc}")
        exit_code = EXIT_FAILURE
        error_type = type(exc).__name__

    return ErrorReport(
        exit_code=exit_code,
        detail=str(exc),
        error_type=error_type,
        key=key,
        line=line,
    )
