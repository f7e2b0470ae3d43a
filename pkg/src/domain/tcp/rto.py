"""Coarse-grained retransmission timeout estimation."""

from typing import Optional

from domain.models import NS_PER_MS, NS_PER_SECOND


class RtoEstimator:
    """
    srtt + 4 * rttvar, rounded up to whole timer ticks, with exponential back-off.

    srtt/rttvar use the usual 1/8 and 1/4 gains. The caller applies Karn's rule by
    never feeding samples taken from retransmitted segments.
    """

    def __init__(
        self,
        granularity_ns: int = 500 * NS_PER_MS,
        min_ticks: int = 2,
        max_ns: int = 64 * NS_PER_SECOND,
        initial_ns: int = 3 * NS_PER_SECOND,
    ):
        if granularity_ns <= 0:
            raise ValueError("Timer granularity must be positive")
        self.granularity_ns = granularity_ns
        self.min_ns = min_ticks * granularity_ns
        self.max_ns = max_ns
        self.initial_ns = initial_ns
        self.srtt: Optional[int] = None
        self.rttvar: Optional[int] = None
        self.first_sample_ns: Optional[int] = None
        self._backoff = 0

    def sample(self, rtt_ns: int) -> None:
        if self.srtt is None or self.rttvar is None:
            self.first_sample_ns = rtt_ns
            self.srtt = rtt_ns
            self.rttvar = rtt_ns // 2
        else:
            delta = rtt_ns - self.srtt
            self.srtt += delta // 8
            self.rttvar += (abs(delta) - self.rttvar) // 4
        self._backoff = 0

    def _base_ns(self) -> int:
        if self.srtt is None or self.rttvar is None:
            raw = self.initial_ns
        else:
            raw = self.srtt + 4 * self.rttvar
        ticks = -(-raw // self.granularity_ns)
        return max(ticks * self.granularity_ns, self.min_ns)

    def current_ns(self) -> int:
        return min(self._base_ns() << self._backoff, self.max_ns)

    def back_off(self) -> None:
        if (self._base_ns() << self._backoff) < self.max_ns:
            self._backoff += 1
