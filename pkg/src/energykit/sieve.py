"""Polynomial sieve assembly: the c_{i,j}(alpha) table, the sums S_{i,j}(p, q)
by direct scan and by completed exponential sums, the sieve bound with its
isolated main term, and the final exponent bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, getcontext
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .energy import GeneralInstance
from .errors import BudgetExceeded
from .ffield import (
    SieveSurface,
    build_sieve_surface,
    phi_solutions,
    primes_up_to,
    psi_direct_rows,
    psi_factored_table,
    psi_weights,
    vp_table,
)
from .geometry import binary_form_discriminant, family_census_value
from .polyarith import integer_roots


def c_table(alpha: int, d: int) -> list[list[int]]:
    """Sieve weights c_{i,j}(alpha) for i, j in {0, 1, 2}; d is the degree of the
    detection polynomial in its root variable."""
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    c10 = alpha + (alpha - 1) * d - d * d
    c20 = -alpha - d
    c21 = -1 - d
    return [
        [(alpha - d) ** 2, c10, c20],
        [c10, (1 + d) ** 2, c21],
        [c20, c21, 1],
    ]


def main_term_weight(alpha: int, d: int) -> int:
    """sum_{i,j} c_{i,j}(alpha) max(1, i) max(1, j): the main-term coefficient when
    Sigma_t(p; 0, 0) ~ max(1, t) p^2."""
    w = (1, 1, 2)
    c = c_table(alpha, d)
    return sum(c[i][j] * w[i] * w[j] for i in range(3) for j in range(3))


def exclusion_product(inst: GeneralInstance, h: int) -> int:
    """6 a b g_{d-1}(b, a) cont(f_d) Disc[f_d] Disc[K_h] Disc[P_h] h."""
    d = inst.d
    fd = inst.f.homogeneous_part(d)
    gd1 = inst.g.homogeneous_part(d - 1)
    g_ba = int(gd1(inst.b, inst.a))
    cont = fd.content()
    disc_fd = binary_form_discriminant(fd)
    disc_k = family_census_value(inst, "K", h)
    disc_p = family_census_value(inst, "P", h)
    return 6 * inst.a * inst.b * g_ba * cont * disc_fd * disc_k * disc_p * h


@lru_cache(maxsize=256)
def admissible_primes(inst: GeneralInstance, h: int, Q: int) -> tuple[int, ...]:
    prod = exclusion_product(inst, h)
    if prod == 0:
        return ()
    return tuple(p for p in primes_up_to(int(Q)) if prod % p)


@dataclass(frozen=True)
class SieveContext:
    inst: GeneralInstance
    h: int
    Q: float
    primes: tuple
    alpha: int = 1

    def __post_init__(self):
        if self.alpha < 1:
            raise ValueError("alpha must be at least 1")
        if self.h == 0:
            raise ValueError("h must be nonzero")

    @property
    def B(self) -> int:
        return self.inst.B

    @property
    def surface(self) -> SieveSurface:
        return _surface(self.inst, self.h)

    @property
    def sieve_degree(self) -> int:
        """Degree of K_h(X1, X2, x, 1) in x."""
        return self.inst.d - 1

    @classmethod
    def build(cls, inst: GeneralInstance, h: int, Q: float | None = None, alpha: int = 1,
              primes: Sequence[int] | None = None) -> "SieveContext":
        """Q defaults to B^(1/(3d)); primes default to the admissible primes up to Q."""
        if Q is None:
            Q = inst.B ** (1 / (3 * inst.d))
        if primes is None:
            primes = admissible_primes(inst, h, int(Q))
        return cls(inst, h, Q, tuple(primes), alpha)

    def congruence_set(self) -> tuple[np.ndarray, np.ndarray]:
        """(X1, X2) in [1, B]^2 with (2ab)^(d-1) f = (2ab)^(d-1) k mod |h|, as coordinate arrays."""
        return _congruence_set(self.inst, self.h)


@lru_cache(maxsize=64)
def _surface(inst: GeneralInstance, h: int) -> SieveSurface:
    return build_sieve_surface(inst, h)


@lru_cache(maxsize=64)
def _congruence_set(inst: GeneralInstance, h: int):
    B = inst.B
    if B * B > 10**7:
        raise BudgetExceeded("congruence set would exceed 10^7 points")
    hp = abs(h)
    S = phi_solutions(inst, hp)
    r = np.arange(1, B + 1) % hp
    mask = S[np.ix_(r, r)].astype(bool)
    xs, ys = np.nonzero(mask)
    return xs + 1, ys + 1


def s_ij_direct(ctx: SieveContext, i: int, j: int, p: int, q: int) -> int:
    """sum over (X1, X2) in the congruence set of v_p^i v_q^j, exactly."""
    xs, ys = ctx.congruence_set()
    if len(xs) == 0:
        return 0
    Vp = vp_table(ctx.surface, p).astype(object) ** i
    Vq = vp_table(ctx.surface, q).astype(object) ** j
    return int(np.sum(Vp[xs % p, ys % p] * Vq[xs % q, ys % q]))


def gamma_sum(B: int, m: int, L: int) -> complex:
    """Gamma(B, m) = sum_{1 <= l <= B} e(-m l / L), in closed geometric form."""
    if m % L == 0:
        return complex(B)
    theta = -2 * math.pi * (m % L) / L
    z = complex(math.cos(theta), math.sin(theta))
    zB = complex(math.cos(theta * B), math.sin(theta * B))
    return z * (1 - zB) / (1 - z)


def _centered(L: int) -> np.ndarray:
    """m with -L/2 < m <= L/2."""
    return np.arange(-((L - 1) // 2), L // 2 + 1, dtype=np.int64)


def s_ij_completed(ctx: SieveContext, i: int, j: int, p: int, q: int, factored: bool = True) -> complex:
    """(1/(pq|h|)^2) sum_{m,n} Gamma(B,m) Gamma(B,n) Psi_{i,j}(m,n)."""
    hp = abs(ctx.h)
    if math.gcd(p * q, hp) != 1:
        raise ValueError("gcd(pq, h) must be 1")
    L = p * q * hp
    ms = _centered(L)
    G = np.array([gamma_sum(ctx.B, int(m), L) for m in ms])
    if factored:
        table = psi_factored_table(i, j, p, q, ctx.h, ctx.surface)
        Psi = table[np.ix_(ms % L, ms % L)]
    else:
        Psi = psi_direct_rows(i, j, [int(m) for m in ms], p, q, ctx.h, ctx.surface)[:, ms % L]
    return complex(G @ Psi @ G) / L**2


def lhs_count(ctx: SieveContext) -> int:
    """#{(X1, X2) in the congruence set : K_h(X1, X2, x, 1) = 0 has an integer root x}."""
    xs, ys = ctx.congruence_set()
    surf = ctx.surface
    count = 0
    for x1, x2 in zip(xs.tolist(), ys.tolist()):
        poly = surf.detection_poly(x1, x2)
        if poly.is_zero() or integer_roots(poly):
            count += 1
    return count


@dataclass
class SieveReport:
    h: int
    Q: float
    alpha: int
    lhs: int
    rhs: float
    per_pair: dict
    main_term: dict
    main_coefficient: float
    primes: tuple

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf

    def to_json(self) -> dict:
        return {
            "h": self.h,
            "Q": self.Q,
            "alpha": self.alpha,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "primes": list(self.primes),
            "main_coefficient": self.main_coefficient,
        }


def main_term_values(ctx: SieveContext, p: int, q: int) -> np.ndarray:
    """L_{i,j}(p, q) = B^2 Psi_{i,j}(0, 0) / (pq|h|)^2 for i, j in {0, 1, 2}."""
    L = p * q * abs(ctx.h)
    out = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            W = psi_weights(i, j, p, q, ctx.h, ctx.surface)
            out[i, j] = ctx.B**2 * int(W.sum()) / L**2
    return out


def sieve_bound(ctx: SieveContext) -> SieveReport:
    """Evaluate the sieve right-hand side over all pairs of admissible primes.

    The (m, n) = (0, 0) term is isolated per pair; ``main_coefficient`` is the
    average of sum c_{i,j}(alpha) L_{i,j} over pairs p != q, divided by
    B^2 Phi(h; 0, 0) / h^2."""
    if not ctx.primes:
        raise ValueError("no sieving primes: enlarge Q")
    dsv = ctx.sieve_degree
    c = np.array(c_table(ctx.alpha, dsv), dtype=float)
    per_pair: dict = {}
    main: dict = {}
    total = 0.0
    for p in ctx.primes:
        for q in ctx.primes:
            S = np.array([[s_ij_direct(ctx, i, j, p, q) for j in range(3)] for i in range(3)], dtype=float)
            val = float(np.sum(c * S))
            per_pair[(p, q)] = val
            total += abs(val)
            main[(p, q)] = float(np.sum(c * main_term_values(ctx, p, q)))
    rhs = total / len(ctx.primes) ** 2
    hp = abs(ctx.h)
    phi00 = int(phi_solutions(ctx.inst, hp).sum())
    scale = ctx.B**2 * phi00 / hp**2
    off = [v for (p, q), v in main.items() if p != q]
    coeff = (sum(off) / len(off) / scale) if off and scale else float("nan")
    return SieveReport(ctx.h, ctx.Q, ctx.alpha, lhs_count(ctx), rhs, per_pair, main, coeff, ctx.primes)


# ---------------------------------------------------------------------------
# exponent bookkeeping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentSummary:
    d: int
    sieve_exponent: Fraction
    determinant_exponent: Decimal
    target: Fraction
    regime: str

    @property
    def refined(self) -> Decimal:
        if self.regime == "sieve":
            return Decimal(self.sieve_exponent.numerator) / Decimal(self.sieve_exponent.denominator)
        return self.determinant_exponent

    @property
    def below_target(self) -> bool:
        if self.regime == "sieve":
            return self.sieve_exponent < self.target
        return self.determinant_exponent < Decimal(self.target.numerator) / Decimal(self.target.denominator)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "regime": self.regime,
            "refined_exponent": str(self.refined),
            "sieve_exponent": f"{self.sieve_exponent}",
            "determinant_exponent": str(self.determinant_exponent),
            "target": f"{self.target}",
            "target_decimal": f"{float(self.target):.6f}",
            "below_target": self.below_target,
        }


def determinant_exponent(d: int, precision: int = 60) -> Decimal:
    """1 + max(1/2, 2/sqrt(d) + 1/(d-1) - 1/((d-2) sqrt(d))) in decimal arithmetic."""
    if d < 3:
        raise ValueError("d must be at least 3")
    getcontext().prec = precision
    sd = Decimal(d).sqrt()
    inner = Decimal(2) / sd + Decimal(1) / Decimal(d - 1) - Decimal(1) / (Decimal(d - 2) * sd)
    return 1 + max(Decimal("0.5"), inner)


def exponent_calculator(d: int, precision: int = 60) -> ExponentSummary:
    """Refined exponent against the target 2 - 1/(50d).

    The sieve exponent 2 - 1/(3d) governs d in {3, 4} and is compared exactly;
    the determinant-method exponent governs d >= 5."""
    if d < 3:
        raise ValueError("d must be at least 3")
    target = Fraction(2) - Fraction(1, 50 * d)
    regime = "sieve" if d in (3, 4) else "determinant"
    return ExponentSummary(d, Fraction(2) - Fraction(1, 3 * d), determinant_exponent(d, precision), target, regime)


def balance_exponents(d: int) -> tuple[Fraction, Fraction]:
    """Exponents of Q^2 B^(2 - 1/d) and B^2 / Q at Q = B^(1/(3d))."""
    q = Fraction(1, 3 * d)
    return 2 * q + 2 - Fraction(1, d), 2 - q


def balance_identity(d: int) -> bool:
    """Both error terms equal B^(2 - 1/(3d)) at Q = B^(1/(3d))."""
    a, b = balance_exponents(d)
    return a == b == Fraction(2) - Fraction(1, 3 * d)
