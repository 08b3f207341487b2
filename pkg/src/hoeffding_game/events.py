"""The one-sided deviation event ``(1/N) sum (x_n - mu_n) >= t``."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidEvent

# Relative guard for float sums landing exactly on the threshold; ties count.
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class DeviationEvent:
    horizon: int
    threshold: float

    def __post_init__(self):
        if not (isinstance(self.horizon, int) and self.horizon >= 1):
            raise InvalidEvent(f"horizon must be a positive integer, got {self.horizon!r}")
        if not (math.isfinite(self.threshold) and self.threshold > 0):
            raise InvalidEvent(f"threshold must be > 0, got {self.threshold!r}")

    @property
    def target_sum(self) -> float:
        """Threshold on the centered sum, ``N * t``."""
        return self.horizon * self.threshold

    def occurred(self, centered_sum):
        """Whether a centered sum (or array of sums) lies in the event."""
        target = self.target_sum
        return centered_sum >= target - TIE_RTOL * max(1.0, abs(target))
