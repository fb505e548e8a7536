"""Exact counts of E_f(B;k), of the general count M_{f,g}(B;k), and of curve
points in a box, plus log-log growth-exponent scans.

All boxes are {1, ..., B}: coordinates are positive integers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExceeded
from .fitting import FitResult, fit_exponent
from .polyarith import IntPoly1, MPoly, cofactor_by_difference, integer_roots

_INT64_SAFE = 2**62


@dataclass(frozen=True)
class Budget:
    """Hard limits; exceeding any raises BudgetExceeded (never silent truncation)."""

    max_ops: int = 10**9
    max_pairs: int = 50_000_000
    max_seconds: float = float("inf")


DEFAULT_BUDGET = Budget()


@dataclass(frozen=True)
class EnergyInstance:
    f: IntPoly1
    k: int
    B: int

    def __post_init__(self):
        if self.f.degree < 3:
            raise ValueError("energy instances need deg f >= 3")
        if self.B < 1:
            raise ValueError("B must be positive")


@dataclass(frozen=True)
class GeneralInstance:
    """f(x1,x2) = (a*x3 - b*x4) g(x3,x4) + k over {1..B}^4."""

    f: MPoly
    g: MPoly
    a: int
    b: int
    k: int
    B: int = 1

    def __post_init__(self):
        if self.f.vars != ("x", "y") or self.g.vars != ("x", "y"):
            raise ValueError("f and g must be polynomials in (x, y)")
        if self.f.coefficient((0, 0)) != 0:
            raise ValueError("f must have zero constant term")
        if self.a * self.b * self.k == 0:
            raise ValueError("a, b and k must be nonzero")
        if self.g.total_degree != self.f.total_degree - 1:
            raise ValueError("deg g must equal deg f - 1")
        if self.B < 1:
            raise ValueError("B must be positive")

    @property
    def d(self) -> int:
        return self.f.total_degree

    @classmethod
    def from_energy(cls, p: IntPoly1, k: int, B: int = 1) -> "GeneralInstance":
        """f = p(x) - p(y), g = f/(x - y), a = b = 1."""
        vars = ("x", "y")
        fx = MPoly({(i, 0): c for i, c in enumerate(p.coeffs) if c}, vars)
        fy = MPoly({(0, i): c for i, c in enumerate(p.coeffs) if c}, vars)
        f = fx - fy
        return cls(f, cofactor_by_difference(f), 1, 1, k, B)

    def with_B(self, B: int) -> "GeneralInstance":
        return GeneralInstance(self.f, self.g, self.a, self.b, self.k, B)

    def rhs_poly(self) -> MPoly:
        """(a*x - b*y) g(x, y) as a polynomial in (x, y)."""
        vars = ("x", "y")
        lin = MPoly({(1, 0): self.a, (0, 1): -self.b}, vars)
        return lin * self.g


@dataclass(frozen=True)
class CountResult:
    count: int
    algorithm: str
    seconds: float


def _values(f: IntPoly1, B: int) -> list[int]:
    return [f(x) for x in range(1, B + 1)]


def energy_bruteforce(inst: EnergyInstance, budget: Budget = DEFAULT_BUDGET) -> CountResult:
    """Enumerate all B^4 quadruples (the innermost coordinate is scanned in C)."""
    B = inst.B
    if B**4 > budget.max_ops:
        raise BudgetExceeded(f"brute force needs {B**4} evaluations > {budget.max_ops}")
    t0 = time.perf_counter()
    vals = _values(inst.f, B)
    k = inst.k
    count = 0
    for v1 in vals:
        for v2 in vals:
            s = v1 + v2 - k
            for v3 in vals:
                count += vals.count(s - v3)
        if time.perf_counter() - t0 > budget.max_seconds:
            raise BudgetExceeded("wall-time budget exceeded")
    return CountResult(count, "bruteforce", time.perf_counter() - t0)


def _pair_sums(vals: Sequence[int], budget: Budget):
    """Sorted distinct pair sums and multiplicities (int64 when safe, else Python ints)."""
    B = len(vals)
    if B * B > budget.max_pairs:
        raise BudgetExceeded(f"{B * B} pair sums exceed the budget of {budget.max_pairs}")
    bound = 2 * max((abs(v) for v in vals), default=0)
    if bound < _INT64_SAFE:
        v = np.asarray(vals, dtype=np.int64)
        sums = (v[:, None] + v[None, :]).ravel()
        uniq, counts = np.unique(sums, return_counts=True)
        return uniq, counts.astype(np.int64), True
    from collections import Counter

    c = Counter(a + b for a in vals for b in vals)
    keys = sorted(c)
    return keys, [c[x] for x in keys], False


def _offset_matches(uniq, counts, k, fast: bool) -> int:
    """sum over u of cnt(u) * cnt(u - k)."""
    if fast:
        if abs(k) >= _INT64_SAFE:
            return 0
        target = uniq - np.int64(k)
        idx = np.searchsorted(uniq, target)
        idx_c = np.minimum(idx, len(uniq) - 1)
        hit = uniq[idx_c] == target
        # products stay below 2^63 for any B within the pair budget
        return int(np.sum(counts[hit].astype(object) * counts[idx_c[hit]].astype(object)))
    lookup = dict(zip(uniq, counts))
    return sum(c * lookup.get(u - k, 0) for u, c in zip(uniq, counts))


def energy_mitm(inst: EnergyInstance, budget: Budget = DEFAULT_BUDGET) -> CountResult:
    """Meet in the middle: sorted pair sums intersected with themselves shifted by k."""
    t0 = time.perf_counter()
    uniq, counts, fast = _pair_sums(_values(inst.f, inst.B), budget)
    count = _offset_matches(uniq, counts, inst.k, fast)
    return CountResult(count, "mitm", time.perf_counter() - t0)


def energy_histogram(f: IntPoly1, B: int, budget: Budget = DEFAULT_BUDGET) -> dict[int, int]:
    """Full map k -> E_f(B;k) from a single sort of the pair sums."""
    uniq, counts, fast = _pair_sums(_values(f, B), budget)
    n = len(uniq)
    if n * n > budget.max_pairs * 4:
        raise BudgetExceeded("difference table too large")
    if fast and 2 * max(abs(int(uniq[0])), abs(int(uniq[-1]))) < _INT64_SAFE:
        diffs = (uniq[:, None] - uniq[None, :]).ravel()
        weights = (counts[:, None] * counts[None, :]).ravel()
        keys, inv = np.unique(diffs, return_inverse=True)
        sums = np.zeros(len(keys), dtype=np.int64)
        np.add.at(sums, inv, weights)
        return {int(k): int(s) for k, s in zip(keys, sums)}
    hist: dict[int, int] = {}
    for u, cu in zip(uniq, counts):
        for w, cw in zip(uniq, counts):
            key = int(u) - int(w)
            hist[key] = hist.get(key, 0) + int(cu) * int(cw)
    return hist


def grid_values(F: MPoly, B: int):
    """F(x, y) for 1 <= x, y <= B as a B-by-B array (object dtype if int64 could overflow)."""
    deg = max(F.total_degree, 0)
    bound = sum(abs(c) for c in F.terms.values()) * max(B, 1) ** deg
    xs = np.arange(1, B + 1, dtype=np.int64 if bound < _INT64_SAFE else object)
    if bound >= _INT64_SAFE:
        xs = np.array([int(v) for v in range(1, B + 1)], dtype=object)
    X = xs[:, None]
    Y = xs[None, :]
    out = np.zeros((B, B), dtype=xs.dtype)
    for (i, j), c in F.terms.items():
        out = out + int(c) * (X**i) * (Y**j)
    return out


def general_count(inst: GeneralInstance, budget: Budget = DEFAULT_BUDGET) -> CountResult:
    """Exact M_{f,g}(B;k): matches LHS pair values against RHS pair values plus k."""
    t0 = time.perf_counter()
    B = inst.B
    if B * B > budget.max_pairs:
        raise BudgetExceeded(f"{B * B} pairs exceed the budget of {budget.max_pairs}")
    lhs = grid_values(inst.f, B).ravel()
    rhs = grid_values(inst.rhs_poly(), B).ravel()
    if lhs.dtype == object or rhs.dtype == object:
        from collections import Counter

        cl = Counter(int(v) for v in lhs)
        count = sum(cl.get(int(v) + inst.k, 0) for v in rhs)
        return CountResult(count, "mitm-general", time.perf_counter() - t0)
    ul, cl = np.unique(lhs, return_counts=True)
    ur, cr = np.unique(rhs, return_counts=True)
    if abs(inst.k) >= _INT64_SAFE:
        return CountResult(0, "mitm-general", time.perf_counter() - t0)
    target = ur + np.int64(inst.k)
    idx = np.minimum(np.searchsorted(ul, target), len(ul) - 1)
    hit = ul[idx] == target
    count = int(np.sum(cl[idx[hit]].astype(object) * cr[hit].astype(object)))
    return CountResult(count, "mitm-general", time.perf_counter() - t0)


def general_bruteforce(inst: GeneralInstance, budget: Budget = DEFAULT_BUDGET) -> CountResult:
    """Direct B^4 enumeration of the general equation (oracle for small B)."""
    B = inst.B
    if B**4 > budget.max_ops:
        raise BudgetExceeded("brute force budget exceeded")
    t0 = time.perf_counter()
    rhs = inst.rhs_poly()
    L = [[inst.f(x1, x2) for x2 in range(1, B + 1)] for x1 in range(1, B + 1)]
    R = [[rhs(x3, x4) + inst.k for x4 in range(1, B + 1)] for x3 in range(1, B + 1)]
    flatR = [v for row in R for v in row]
    count = sum(flatR.count(v) for row in L for v in row)
    return CountResult(count, "bruteforce-general", time.perf_counter() - t0)


class CurveCounter:
    """Counts points of F(x, y) = l in {1..B}^2 by x-major scan.

    For each x the slice F(x, .) - l is a univariate integer polynomial whose
    integer roots in [1, B] are extracted exactly.
    """

    def __init__(self, F: MPoly):
        if F.total_degree < 1:
            raise ValueError("F must be nonconstant")
        x, y = F.vars
        self.F = F
        self.rows = [c.to_univariate(x) if c.vars else c for c in F.coefficients_in(y)]
        self.rows = [r if not r.is_zero() else IntPoly1([], x) for r in self.rows]

    def slice(self, xv: int, l: int) -> IntPoly1:
        cs = [r(xv) for r in self.rows]
        cs[0] = cs[0] - l if cs else -l
        return IntPoly1(cs, "y")

    def count(self, l: int, B: int) -> int:
        total = 0
        for xv in range(1, B + 1):
            s = self.slice(xv, l)
            if s.is_zero():
                total += B
            elif s.degree >= 1:
                total += len(integer_roots(s, 1, B))
        return total


def curve_count_in_box(F: MPoly, l: int, B: int) -> CountResult:
    """#{(x, y) in {1..B}^2 : F(x, y) = l}."""
    t0 = time.perf_counter()
    n = CurveCounter(F).count(l, B)
    return CountResult(n, "curve-scan", time.perf_counter() - t0)


@dataclass(frozen=True)
class ScanResult:
    Bs: tuple
    counts: tuple
    fit: FitResult

    @property
    def slope(self) -> float:
        return self.fit.slope


def exponent_scan(counter: Callable[[int], int], Bs: Sequence[int]) -> ScanResult:
    """Evaluate counter(B) over a strictly increasing B list and fit the log-log slope."""
    Bs = list(Bs)
    if len(Bs) < 3:
        raise ValueError("need at least 3 values of B")
    if any(b2 <= b1 for b1, b2 in zip(Bs, Bs[1:])):
        raise ValueError("B list must be strictly increasing")
    counts = [int(counter(B)) for B in Bs]
    return ScanResult(tuple(Bs), tuple(counts), fit_exponent(zip(Bs, counts)))
