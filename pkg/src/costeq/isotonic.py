"""Weighted isotonic regression (pool adjacent violators) with interpolating prediction."""

from __future__ import annotations

import enum
import math
import numbers
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateInputError, ValidationError

INCREASING = "increasing"
DECREASING = "decreasing"
DIRECTIONS = (INCREASING, DECREASING)


class Flag(str, enum.Enum):
    """Where a query point fell relative to a fit's domain."""

    IN_RANGE = "in-range"
    CLAMPED_LOW = "clamped-low"
    CLAMPED_HIGH = "clamped-high"


@dataclass(frozen=True)
class MonotoneSample:
    """One (cost, benefit, weight) observation of a learning curve."""

    x: float
    y: float
    w: float = 1.0

    def __post_init__(self) -> None:
        for name in ("x", "y", "w"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, numbers.Real) or not math.isfinite(v):
                raise ValidationError(f"sample {name} must be a finite number, got {v!r}")
        if self.x < 0:
            raise ValidationError(f"sample cost must be non-negative, got {self.x!r}")
        if self.w <= 0:
            raise ValidationError(f"sample weight must be positive, got {self.w!r}")


@dataclass(frozen=True)
class IsotonicFit:
    """A monotone piecewise-linear curve through (knot, value) pairs.

    Prediction interpolates linearly between knots and clamps outside
    ``x_range``; use :meth:`locate` to learn whether a query was clamped.
    """

    direction: str
    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS:
            raise ValidationError(f"unknown direction {self.direction!r}")
        if len(self.knots) != len(self.values) or not self.knots:
            raise ValidationError("knots and values must be non-empty and of equal length")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ValidationError("knots must be strictly increasing")
        if self.direction == INCREASING:
            bad = any(b < a for a, b in zip(self.values, self.values[1:]))
        else:
            bad = any(b > a for a, b in zip(self.values, self.values[1:]))
        if bad:
            raise ValidationError(f"values are not {self.direction}")

    @property
    def x_range(self) -> tuple[float, float]:
        return self.knots[0], self.knots[-1]

    @property
    def y_range(self) -> tuple[float, float]:
        return min(self.values), max(self.values)

    def locate(self, x: float) -> Flag:
        _check_finite(x)
        if x < self.knots[0]:
            return Flag.CLAMPED_LOW
        if x > self.knots[-1]:
            return Flag.CLAMPED_HIGH
        return Flag.IN_RANGE

    def in_range(self, x: float) -> bool:
        return self.locate(x) is Flag.IN_RANGE

    def predict(self, x: float) -> float:
        _check_finite(x)
        knots, values = self.knots, self.values
        if x <= knots[0]:
            return values[0]
        if x >= knots[-1]:
            return values[-1]
        i = bisect_right(knots, x) - 1
        x0, v0 = knots[i], values[i]
        if x == x0:
            return v0
        x1, v1 = knots[i + 1], values[i + 1]
        return v0 + (x - x0) / (x1 - x0) * (v1 - v0)

    __call__ = predict


def _check_finite(x: float) -> None:
    if isinstance(x, bool) or not isinstance(x, numbers.Real) or not math.isfinite(x):
        raise ValidationError(f"query must be a finite number, got {x!r}")


def pool_duplicates(
    x: Sequence[float], y: Sequence[float], w: Sequence[float]
) -> tuple[list[float], list[float], list[float]]:
    """Sort by x and collapse equal x to their weighted-mean y with summed weight."""
    order = sorted(range(len(x)), key=lambda i: x[i])
    xs: list[float] = []
    ys: list[float] = []
    ws: list[float] = []
    for i in order:
        if xs and x[i] == xs[-1]:
            total = ws[-1] + w[i]
            ys[-1] = (ys[-1] * ws[-1] + y[i] * w[i]) / total
            ws[-1] = total
        else:
            xs.append(x[i])
            ys.append(y[i])
            ws.append(w[i])
    return xs, ys, ws


def pava(y: Sequence[float], w: Sequence[float]) -> list[float]:
    """Non-decreasing least-squares fit of ``y`` under weights ``w``.

    Adjacent violating blocks are merged greedily left to right. Block means
    are carried directly (not as weighted sums) so singleton blocks reproduce
    their input exactly.
    """
    means: list[float] = []
    weights: list[float] = []
    sizes: list[int] = []
    for yi, wi in zip(y, w):
        means.append(yi)
        weights.append(wi)
        sizes.append(1)
        while len(means) > 1 and means[-2] > means[-1]:
            m2, w2, n2 = means.pop(), weights.pop(), sizes.pop()
            m1, w1 = means[-1], weights[-1]
            total = w1 + w2
            means[-1] = (m1 * w1 + m2 * w2) / total
            weights[-1] = total
            sizes[-1] += n2
    out: list[float] = []
    for m, n in zip(means, sizes):
        out.extend([m] * n)
    return out


def fit_arrays(
    x: Sequence[float],
    y: Sequence[float],
    w: Sequence[float] | None = None,
    direction: str = INCREASING,
) -> IsotonicFit:
    """Fit raw coordinate arrays; ``x`` may be any finite reals (used for swapped axes)."""
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    if w is None:
        w = [1.0] * len(x)
    if not (len(x) == len(y) == len(w)):
        raise ValidationError("x, y and w must have equal length")
    for v in (*x, *y, *w):
        if not math.isfinite(v):
            raise ValidationError(f"non-finite input {v!r}")
    if any(v <= 0 for v in w):
        raise ValidationError("weights must be positive")
    xs, ys, ws = pool_duplicates(x, y, w)
    if len(xs) < 2:
        raise DegenerateInputError(f"need at least 2 distinct x values, got {len(xs)}")
    if direction == DECREASING:
        fitted = [-v for v in pava([-v for v in ys], ws)]
    else:
        fitted = pava(ys, ws)
    return IsotonicFit(direction, tuple(float(v) for v in xs), tuple(float(v) for v in fitted))


def _columns(samples: Iterable[MonotoneSample]) -> tuple[list[float], list[float], list[float]]:
    samples = list(samples)
    for s in samples:
        if not isinstance(s, MonotoneSample):
            raise ValidationError(f"expected MonotoneSample, got {type(s).__name__}")
    return [s.x for s in samples], [s.y for s in samples], [s.w for s in samples]


def fit_isotonic(samples: Iterable[MonotoneSample], direction: str = INCREASING) -> IsotonicFit:
    """Fit benefit as a monotone function of cost."""
    x, y, w = _columns(samples)
    return fit_arrays(x, y, w, direction)


def fit_inverse(samples: Iterable[MonotoneSample], direction: str = INCREASING) -> IsotonicFit:
    """Fit cost as a monotone function of benefit by swapping the regression axes.

    Samples sharing a benefit pool to their weighted-mean cost. ``direction``
    is the direction of the original cost-to-benefit curve, which is also the
    direction of its inverse.
    """
    x, y, w = _columns(samples)
    return fit_arrays(y, x, w, direction)


def predict(fit: IsotonicFit, x: float) -> float:
    return fit.predict(x)
