"""Least-squares growth exponents from (B, count) data on a log-log scale."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class InsufficientData(ValueError):
    """Fewer than two positive counts remain after dropping zeros."""


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float  # log10 scale
    stderr: float
    used: tuple = ()
    dropped: tuple = field(default_factory=tuple)

    @property
    def zeros_dropped(self) -> bool:
        return bool(self.dropped)


def fit_exponent(pairs: Iterable[Sequence[float]]) -> FitResult:
    """OLS slope of log10(count) against log10(B); zero counts are dropped and reported."""
    pts = [(float(b), float(c)) for b, c in pairs]
    used = [(b, c) for b, c in pts if c > 0]
    dropped = tuple(b for b, c in pts if c <= 0)
    if len(used) < 2:
        raise InsufficientData(f"need at least 2 nonzero counts, got {len(used)}")
    xs = [math.log10(b) for b, _ in used]
    ys = [math.log10(c) for _, c in used]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise InsufficientData("all B values coincide")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    if n > 2:
        ssr = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
        stderr = math.sqrt(ssr / (n - 2) / sxx)
    else:
        stderr = 0.0
    return FitResult(slope, intercept, stderr, tuple(b for b, _ in used), dropped)
