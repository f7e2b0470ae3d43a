"""Efficiency, fairness and the SACK recovery-time bound."""

from fractions import Fraction
from typing import Sequence, Union

from domain.models import NS_PER_SECOND


def throughput_bps(delivered_bytes: int, duration_ns: int) -> float:
    """Application goodput over the whole run, slow-start transient included."""
    if duration_ns <= 0:
        raise ValueError(f"Duration must be positive, got {duration_ns} ns")
    return delivered_bytes * 8 * NS_PER_SECOND / duration_ns


def efficiency(throughputs: Sequence[float], max_goodput: float) -> float:
    """Sum of per-source throughputs over the maximum possible TCP throughput."""
    if max_goodput <= 0:
        raise ValueError(f"max_goodput must be positive, got {max_goodput}")
    return sum(throughputs) / max_goodput


def fairness(x: Sequence[float]) -> float:
    """
    Jain index (sum x)^2 / (N * sum x^2).

    An all-zero vector has no meaningful share and is reported as 0.
    """
    if not x:
        raise ValueError("Fairness needs at least one source")
    if any(v < 0 for v in x):
        raise ValueError("Throughput ratios cannot be negative")
    squares = sum(v * v for v in x)
    if squares == 0:
        return 0.0
    total = sum(x)
    return total * total / (len(x) * squares)


def fairness_from_throughputs(throughputs: Sequence[float], max_goodput: float) -> float:
    """Fairness of achieved/expected ratios where expected is an equal share."""
    if not throughputs:
        raise ValueError("Fairness needs at least one source")
    expected = max_goodput / len(throughputs)
    return fairness([t / expected for t in throughputs])


def sack_recovery_bound(n: Union[int, str, Fraction]) -> int:
    """
    RTTs SACK needs to retransmit a loss of cwnd/n bytes from one window:
    ceil(log2(n / (n - 2))).
    """
    nf = Fraction(n)
    if nf <= 2:
        raise ValueError(
            f"n={nf}: losing half the window or more is outside the recovery model"
        )
    ratio = nf / (nf - 2)
    rtts = 0
    while 2**rtts < ratio:
        rtts += 1
    return rtts
