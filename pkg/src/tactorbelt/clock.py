"""Monotonic clock abstraction so real-time code is testable off-line."""

from __future__ import annotations

import time
from typing import Protocol

__all__ = ["Clock", "MonotonicClock", "VirtualClock"]


class Clock(Protocol):
    def now_ms(self) -> float: ...

    def sleep_until_ms(self, deadline_ms: float) -> None: ...


class MonotonicClock:
    """Wall clock on ``time.monotonic``; sleeps in short slices for stop checks."""

    def __init__(self) -> None:
        self._origin = time.monotonic()

    def now_ms(self) -> float:
        return (time.monotonic() - self._origin) * 1000.0

    def sleep_until_ms(self, deadline_ms: float) -> None:
        remaining = (deadline_ms - self.now_ms()) / 1000.0
        if remaining > 0:
            time.sleep(remaining)


class VirtualClock:
    """Deterministic clock for tests: sleeping jumps straight to the deadline."""

    def __init__(self, start_ms: float = 0.0) -> None:
        self._now_ms = start_ms

    def now_ms(self) -> float:
        return self._now_ms

    def sleep_until_ms(self, deadline_ms: float) -> None:
        if deadline_ms > self._now_ms:
            self._now_ms = deadline_ms

    def advance_ms(self, delta_ms: float) -> None:
        self._now_ms += delta_ms
