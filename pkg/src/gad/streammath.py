"""Pure numeric kernels: RAM conversion, AARE, three-sigma threshold, argmin.

All stream indices in this package are 1-based.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .errors import DataError, UsageError

# Denominator guard for relative errors. RAM values sit near 9.8 m/s^2 in
# practice, so this path is defensive only.
EPS_DENOM = 1e-9


@dataclass(frozen=True)
class AccelInstance:
    """One 3-axis accelerometer sample. Unit-agnostic (one unit per run)."""

    ax: float
    ay: float
    az: float


def ram(a: AccelInstance) -> float:
    """Resultant acceleration magnitude: the Euclidean norm of one sample."""
    if not (math.isfinite(a.ax) and math.isfinite(a.ay) and math.isfinite(a.az)):
        raise DataError(f"non-finite accelerometer sample: {a}")
    return math.sqrt(a.ax * a.ax + a.ay * a.ay + a.az * a.az)


class PairWindow:
    """The last `capacity` (actual, predicted) pairs; AARE defined only when full."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise UsageError("pair window capacity must be >= 1")
        self.capacity = capacity
        self._pairs: deque[tuple[float, float]] = deque(maxlen=capacity)

    def __len__(self) -> int:
        return len(self._pairs)

    @property
    def full(self) -> bool:
        return len(self._pairs) == self.capacity

    def push(self, actual: float, predicted: float) -> None:
        self._pairs.append((actual, predicted))

    def replace_last(self, actual: float, predicted: float) -> None:
        if not self._pairs:
            raise UsageError("replace_last on empty pair window")
        self._pairs[-1] = (actual, predicted)

    def pairs(self) -> list[tuple[float, float]]:
        return list(self._pairs)

    def aare(self) -> float:
        """Average absolute relative error over the full window."""
        if not self.full:
            raise UsageError(
                f"AARE needs {self.capacity} pairs, have {len(self._pairs)}"
            )
        total = 0.0
        for actual, predicted in self._pairs:
            denom = abs(actual)
            if denom < EPS_DENOM:
                denom = EPS_DENOM
            total += abs(actual - predicted) / denom
        return total / self.capacity


class ThresholdState:
    """Running mean/std of all AARE values seen so far (Welford accumulators).

    The threshold is mean + 3 * population standard deviation, defined once at
    least three values have been observed.
    """

    __slots__ = ("count", "mean", "m2")

    def __init__(self, count: int = 0, mean: float = 0.0, m2: float = 0.0):
        self.count = count
        self.mean = mean
        self.m2 = m2

    def update(self, new_aare: float) -> None:
        if not math.isfinite(new_aare) or new_aare < 0.0:
            raise DataError(f"AARE value must be finite and >= 0, got {new_aare}")
        self.count += 1
        delta = new_aare - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (new_aare - self.mean)

    @property
    def std(self) -> float:
        if self.count == 0:
            return 0.0
        return math.sqrt(max(self.m2, 0.0) / self.count)

    @property
    def thd(self) -> float | None:
        if self.count < 3:
            return None
        return self.mean + 3.0 * self.std

    def copy(self) -> "ThresholdState":
        return ThresholdState(self.count, self.mean, self.m2)

    def to_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean, "m2": self.m2}

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdState":
        return cls(d["count"], d["mean"], d["m2"])


def threshold_update(ts: ThresholdState, new_aare: float) -> ThresholdState:
    """Functional form of ThresholdState.update (returns a new state)."""
    out = ts.copy()
    out.update(new_aare)
    return out


def argmin_index(values, base_index: int = 1) -> int:
    """Absolute index of the minimum; ties broken by the earliest index."""
    n = len(values)
    if n == 0:
        raise UsageError("argmin over empty sequence")
    best = 0
    for k in range(1, n):
        if values[k] < values[best]:
            best = k
    return base_index + best
