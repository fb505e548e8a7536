"""Root counts of polynomial congruences modulo prime powers, linear
congruences, the line certificate Delta_f(M, N, k), and partial sums of Phi.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .energy import GeneralInstance
from .errors import BudgetExceeded, InvariantError
from .ffield import SCAN_LIMIT, is_prime, pdivmod, pgcd, pmod, pmul, ppowmod, _psub, roots_of_unity
from .polyarith import IntPoly1, MPoly, _UPoly

log = logging.getLogger(__name__)


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class CongruenceQuery:
    Q: IntPoly1
    p: int
    l: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.l < 1:
            raise ValueError("exponent must be at least 1")


# ---------------------------------------------------------------------------
# roots modulo p
# ---------------------------------------------------------------------------


def _split_roots(c: list[int], p: int, rng: random.Random) -> list[int]:
    """Roots of a squarefree product of distinct linear factors (Cantor-Zassenhaus)."""
    deg = len(c) - 1
    if deg == 0:
        return []
    if deg == 1:
        return [(-c[0] * pow(c[1], -1, p)) % p]
    while True:
        a = rng.randrange(p)
        w = ppowmod([a, 1], (p - 1) // 2, c, p)
        g = pgcd(c, _psub(w, [1], p), p)
        if 0 < len(g) - 1 < deg:
            return _split_roots(g, p, rng) + _split_roots(pdivmod(c, g, p)[0], p, rng)


def roots_mod_p(coeffs, p: int) -> list[int]:
    """Sorted distinct roots in F_p of a polynomial that is nonzero mod p."""
    c = pmod(coeffs, p)
    if not c:
        raise ValueError("polynomial vanishes identically mod p")
    if len(c) == 1:
        return []
    if p < SCAN_LIMIT:
        xs = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for a in reversed(c):
            acc = (acc * xs + a) % p
        return [int(v) for v in np.flatnonzero(acc == 0)]
    roots = []
    if c[0] == 0:
        roots.append(0)
        while c and c[0] == 0:
            c = c[1:]
    xp = ppowmod([0, 1], p, c, p)
    g = pgcd(c, _psub(xp, [0, 1], p), p)
    roots += _split_roots(g, p, random.Random(p))
    return sorted(set(roots))


# ---------------------------------------------------------------------------
# Hensel tree
# ---------------------------------------------------------------------------


def _content_valuation(coeffs: list[int], p: int) -> float:
    nz = [c for c in coeffs if c]
    if not nz:
        return math.inf
    return min(vp(c, p) for c in nz)


def _taylor_shift_scale(coeffs: list[int], r: int, p: int) -> list[int]:
    """Coefficients of Q(r + p T) in T."""
    # shift by r (Horner / synthetic division), then scale T -> pT
    a = list(coeffs)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += r * a[j + 1]
    return [c * p**i for i, c in enumerate(a)]


class _HenselCounter:
    def __init__(self, p: int, max_nodes: int):
        self.p = p
        self.nodes = 0
        self.max_nodes = max_nodes

    def count(self, coeffs: list[int], l: int, m: int) -> int:
        """#{T mod p^m : Q(T) = 0 mod p^l}, with m >= l."""
        p = self.p
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise BudgetExceeded("Hensel tree exceeded its node budget")
        if l <= 0:
            return p**m
        c = _content_valuation(coeffs, p)
        if c >= l:
            return p**m
        if c:
            scale = p**c
            coeffs = [x // scale for x in coeffs]
            l -= c
        coeffs = _trim_int(coeffs)
        deriv = [i * coeffs[i] for i in range(1, len(coeffs))]
        total = 0
        for r in roots_mod_p(coeffs, p):
            dval = 0
            for a in reversed(deriv):
                dval = (dval * r + a) % p
            if dval:
                total += p ** (m - l)
            elif l == 1:
                total += p ** (m - 1)
            else:
                total += self.count(_taylor_shift_scale(coeffs, r, p), l, m - 1)
        return total


def _trim_int(c: list[int]) -> list[int]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def count_roots_mod_prime_power(q: CongruenceQuery | _UPoly, p: int | None = None, l: int | None = None,
                                max_nodes: int = 1_000_000) -> int:
    """#{x in Z/p^l : Q(x) = 0 mod p^l} by Hensel-tree lifting."""
    if not isinstance(q, CongruenceQuery):
        q = CongruenceQuery(q, p, l)
    coeffs = [int(c) for c in q.Q.coeffs]
    return _HenselCounter(q.p, max_nodes).count(coeffs, q.l, q.l)


def count_roots_naive(Q: _UPoly, n: int, max_modulus: int = 10**7) -> int:
    """#{x mod n : Q(x) = 0 mod n} by evaluating Q at every residue."""
    if n > max_modulus:
        raise BudgetExceeded(f"modulus {n} exceeds the enumeration budget")
    xs = np.arange(n, dtype=np.int64)
    acc = np.zeros(n, dtype=np.int64)
    for c in reversed(Q.coeffs):
        acc = (acc * xs + int(c) % n) % n
    return int(np.count_nonzero(acc == 0))


def count_roots_composite(Q: _UPoly, n: int) -> int:
    """Product of prime-power counts over the factorisation of n (CRT)."""
    total = 1
    for p, e in _factorize(n).items():
        total *= count_roots_mod_prime_power(Q, p, e)
    return total


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def count_linear_congruence(A: int, B: int, p: int, l: int, m: int) -> int:
    """#{x in Z/p^l : p^m | A x + B} for p not dividing A."""
    if A % p == 0:
        raise ValueError("p must not divide A")
    if m <= l:
        return p ** (l - m)
    # unique residue mod p^l; it works iff its canonical lift satisfies the stronger condition
    x = (-B * pow(A, -1, p**l)) % p**l
    return 1 if (A * x + B) % p**m == 0 else 0


def padic_ratio(Q: IntPoly1, p: int, l: int) -> float:
    """count(Q mod p^l) / p^(l - l/d + v_p(a_d)/d)."""
    d = Q.degree
    lead = int(Q.lc)
    expo = l - l / d + vp(lead, p) / d
    return count_roots_mod_prime_power(Q, p, l) / p**expo


# ---------------------------------------------------------------------------
# Delta_f certificate
# ---------------------------------------------------------------------------

CASES = ("leading-form", "partial-derivative", "E_J-numerator", "E0-minus-k")


@dataclass(frozen=True)
class DeltaCertificate:
    M: int
    N: int
    k: int
    case: str
    value: int
    A: tuple = ()
    B: tuple = ()
    mirrored: bool = False
    prime: int | None = None
    small_prime: bool = False

    def bound_ratio(self, d: int) -> float:
        h = max(abs(self.M), abs(self.N))
        return abs(self.value) / (abs(self.k) * h ** (d * d))

    def to_json(self, d: int) -> dict:
        return {
            "M": self.M,
            "N": self.N,
            "k": self.k,
            "case": self.case,
            "delta": str(self.value),
            "bound_ratio": self.bound_ratio(d),
        }


def _swap(f: MPoly) -> MPoly:
    return MPoly({(j, i): c for (i, j), c in f.terms.items()}, f.vars)


def _numerators(f: MPoly, M: int, N: int):
    """(phi, psi, A_j list, B_j list) for the orientation with N as the nonzero coordinate."""
    d = f.total_degree
    parts = [f.homogeneous_part(i) for i in range(d + 1)]
    fd = parts[d]
    phi = int(parts[d - 1](N, -M)) if not parts[d - 1].is_zero() else 0
    psi = int(fd.partial("y")(N, -M)) if not fd.partial("y").is_zero() else 0
    # d/dy^r f_i evaluated at (N, -M)
    def dy(i: int, r: int) -> int:
        g = parts[i]
        for _ in range(r):
            if g.is_zero():
                return 0
            g = g.partial("y")
        return 0 if g.is_zero() else int(g(N, -M))

    A, B = [], []
    for j in range(d + 1):
        a = 0
        for i in range(j, d + 1):
            a += (math.factorial(d - j) // math.factorial(i - j)) * (-phi) ** (i - j) * psi ** (d - i) * dy(i, i - j)
        A.append(a)
        B.append(N**j * psi ** (d - j) * math.factorial(d - j))
    return phi, psi, A, B


def delta_f(inst: GeneralInstance | tuple, M: int, N: int, p: int | None = None) -> DeltaCertificate:
    """Nonzero integer divisible by every prime p for which the mod-p curve f = k
    contains a line M x + N y = tau.

    When p is given the cascade follows that prime: the partial-derivative
    case is taken when p divides it, and the roles of x and y are exchanged
    when p divides N.  Without p the orientation uses N unless N = 0 and the
    partial-derivative case is not taken, so the result covers primes not
    dividing N * (d f_d/dy)(N, -M).
    """
    f, k = (inst.f, inst.k) if isinstance(inst, GeneralInstance) else inst
    if M == 0 and N == 0:
        raise ValueError("(M, N) must not both be zero")
    d = f.total_degree
    small = False
    if p is not None:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if M % p == 0 and N % p == 0:
            raise ValueError("p divides both M and N")
        if p <= d:
            small = True
            log.info("delta_f: p=%d <= d=%d, certificate not guaranteed", p, d)
        mirrored = N % p == 0
    else:
        mirrored = N == 0
    g, MM, NN = (_swap(f), N, M) if mirrored else (f, M, N)
    fd = g.homogeneous_part(d)
    lead = int(fd(NN, -MM))
    phi, psi, A, B = _numerators(g, MM, NN)
    common = dict(M=M, N=N, k=k, A=tuple(A), B=tuple(B), mirrored=mirrored, prime=p, small_prime=small)
    if lead != 0:
        return DeltaCertificate(case="leading-form", value=lead, **common)
    if psi == 0:
        raise InvariantError("f_d is singular along the line direction")
    if p is not None and psi % p == 0:
        return DeltaCertificate(case="partial-derivative", value=psi, **common)
    for J in range(d - 1, 0, -1):
        if A[J] != 0:
            return DeltaCertificate(case="E_J-numerator", value=A[J], **common)
    val = A[0] - k * B[0]
    if val == 0:
        raise InvariantError("all cases vanish: f = k contains a rational line")
    return DeltaCertificate(case="E0-minus-k", value=val, **common)


def line_in_curve_mod_p(f: MPoly, k: int, M: int, N: int, tau: int, p: int) -> bool:
    """Whether f(x, y) - k vanishes identically on M x + N y = tau over F_p."""
    if N % p:
        inv = pow(N, -1, p)
        lin = [tau * inv % p, -M * inv % p]  # y as a polynomial in x
        swap = False
    elif M % p:
        inv = pow(M, -1, p)
        lin = [tau * inv % p, -N * inv % p]  # x as a polynomial in y
        swap = True
    else:
        raise ValueError("p divides both M and N")
    d = f.total_degree
    pw = [[1]]
    for _ in range(d):
        pw.append(pmul(pw[-1], lin, p) or [])
    acc: list[int] = [(-k) % p]
    for (i, j), c in f.terms.items():
        free, sub = (j, i) if swap else (i, j)
        term = [0] * free + [x * c % p for x in pw[sub]] if pw[sub] else []
        n = max(len(acc), len(term))
        acc = [((acc[t] if t < len(acc) else 0) + (term[t] if t < len(term) else 0)) % p for t in range(n)]
    return not pmod(acc, p)


def lines_mod_p(f: MPoly, k: int, M: int, N: int, p: int) -> list[int]:
    """All tau in F_p for which the line M x + N y = tau lies in f = k mod p."""
    return [t for t in range(p) if line_in_curve_mod_p(f, k, M, N, t, p)]


# ---------------------------------------------------------------------------
# Phi partial sums
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _solutions_mod(inst: GeneralInstance, q: int) -> tuple[np.ndarray, np.ndarray]:
    from .ffield import poly_grid_mod

    scale = (2 * inst.a * inst.b) ** (inst.d - 1) % q
    vals = (scale * (poly_grid_mod(inst.f, q) - inst.k % q)) % q
    xs, ys = np.nonzero(vals == 0)
    return xs.astype(np.int64), ys.astype(np.int64)


def phi_prime_power(inst: GeneralInstance, q: int, M: int, N: int) -> complex:
    xs, ys = _solutions_mod(inst, q)
    if M % q == 0 and N % q == 0:
        return complex(len(xs))
    zeta = roots_of_unity(q)
    return complex(zeta[((M % q) * xs + (N % q) * ys) % q].sum())


def phi_multiplicative(inst: GeneralInstance, h: int, M: int, N: int) -> complex:
    """Phi(h; M, N) assembled from prime-power factors by multiplicativity."""
    h = abs(h)
    if h == 1:
        return 1 + 0j
    out = 1 + 0j
    for p, e in _factorize(h).items():
        q = p**e
        rest = h // q
        inv = pow(rest, -1, q)
        out *= phi_prime_power(inst, q, inv * M, inv * N)
    return out


@dataclass(frozen=True)
class PhiPartialSum:
    H: int
    eps: float
    signed: complex
    absolute: float
    comparison: float


def phi_partial_sum(inst: GeneralInstance, M: int, N: int, H: int, eps: float,
                    max_modulus: int = 5000) -> PhiPartialSum:
    """sum over 1 <= h <= H of Phi(h; M, N) / h^(2 - 1/d + eps).

    Negative h contribute the same terms, so the two-sided sum is twice this.
    ``absolute`` sums |Phi| instead (monotone in H); ``comparison`` is
    |Delta_f|^eps * H^eps (or H^eps when M = N = 0)."""
    if H < 1:
        raise ValueError("H must be positive")
    if H > max_modulus:
        raise BudgetExceeded(f"H={H} exceeds the modulus budget {max_modulus}")
    s = 2 - 1 / inst.d + eps
    signed = 0j
    absolute = 0.0
    for h in range(1, H + 1):
        v = phi_multiplicative(inst, h, M, N)
        signed += v / h**s
        absolute += abs(v) / h**s
    if M == 0 and N == 0:
        comparison = H**eps
    else:
        comparison = abs(delta_f(inst, M, N).value) ** eps * H**eps
    return PhiPartialSum(H, eps, signed, absolute, comparison)


def phi_count(inst: GeneralInstance, q: int) -> int:
    """Phi(q; 0, 0): the number of solutions of the congruence modulo q."""
    return len(_solutions_mod(inst, q)[0])
