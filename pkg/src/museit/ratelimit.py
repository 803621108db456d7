"""Client-side token-bucket rate limiting.

A bucket starts full at its burst capacity and refills continuously at
permits_per_minute / 60 tokens per second. acquire() blocks (sleeps) until a
whole token is available, so callers can simply wrap every outbound request
in an acquire() call and stay inside the advertised request budget.

The clock and sleep functions are injectable so tests can drive a bucket
through simulated time without real delays.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass



@dataclass(frozen=True)
class RateBudget:
    """Request budget: sustained rate plus an optional burst allowance."""

    permits_per_minute: int = 60
    burst: int | None = None

    def __post_init__(self):
        if self.permits_per_minute < 1:
            raise ValueError(f"permits_per_minute must be >= 1, got {self.permits_per_minute}")
        if self.burst is not None and self.burst < 1:
            raise ValueError(f"burst must be >= 1, got {self.burst}")

    @property
    def effective_burst(self) -> int:
        return self.burst if self.burst is not None else self.permits_per_minute

    @property
    def rate_per_second(self) -> float:
        return self.permits_per_minute / 60.0


class TokenBucket:
    """Thread-safe blocking token bucket."""

    def __init__(self, budget: RateBudget, clock=time.monotonic, sleep=time.sleep):
        self.budget = budget
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._tokens = float(budget.effective_burst)
        self._last = clock()

    def _refill_locked(self, now: float) -> None:
        elapsed = now - self._last
        if elapsed > 0:
            self._tokens = min(
                float(self.budget.effective_burst),
                self._tokens + elapsed * self.budget.rate_per_second,
            )
            self._last = now

    def try_acquire(self) -> bool:
        """Take a token if one is available right now, without blocking."""
        with self._lock:
            self._refill_locked(self._clock())
            if self._tokens >= 1.0:
                self._tokens -= 1.0
                return True
            return False

    def acquire(self) -> float:
        """Block until a token is available. Returns the seconds spent waiting."""
        start = self._clock()
        while True:
            wait: float
            with self._lock:
                now = self._clock()
                self._refill_locked(now)
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return self._clock() - start
                wait = (1.0 - self._tokens) / self.budget.rate_per_second
            # Sleep outside the lock so other threads can refill/acquire.
            self._sleep(wait)


_buckets: dict[RateBudget, TokenBucket] = {}
_buckets_lock = threading.Lock()


def bucket_for(budget: RateBudget, clock=time.monotonic, sleep=time.sleep) -> TokenBucket:
    """Return the shared bucket for a budget, creating it on first use.

    All callers passing an equal budget share one bucket, so separate client
    instances in the same process still respect a single combined budget.
    """
    with _buckets_lock:
        bucket = _buckets.get(budget)
        if bucket is None:
            bucket = TokenBucket(budget, clock=clock, sleep=sleep)
            _buckets[budget] = bucket
        return bucket


def acquire_permit(budget: RateBudget) -> float:
    """Block until the shared bucket for this budget releases a permit."""
    return bucket_for(budget).acquire()


def reset_buckets() -> None:
    """Drop all shared buckets (test isolation)."""
    with _buckets_lock:
        _buckets.clear()
