"""Finite fields, local root counts, and the complete exponential sums
Sigma_t, Phi and Psi attached to the sieve surface.

Sums are accumulated in double precision.  Scalar sums use Kahan-compensated
summation; whole-spectrum tables are evaluated as products with a
precomputed root-of-unity matrix.  Whenever a sum is a rational integer by
construction the exact integer is carried alongside.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .energy import GeneralInstance
from .errors import BudgetExceeded, InvariantError
from .polyarith import IntPoly1, MPoly, RatPoly1, _UPoly

# ---------------------------------------------------------------------------
# primes and polynomials over F_p (coefficient lists, low degree first)
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, v in enumerate(sieve) if v]


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def pmod(coeffs: Sequence, p: int) -> list[int]:
    return _trim([int(c) % p for c in coeffs])


def pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def pdivmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("division by zero polynomial mod p")
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv % p
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - c * bj) % p
    return _trim(q), _trim(a[: len(b) - 1])


def pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def ppowmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = pdivmod(pmul(result, base, p), mod, p)[1]
        e >>= 1
        if e:
            base = pdivmod(pmul(base, base, p), mod, p)[1]
    return result


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def q(self) -> int:
        return self.p

    def elements(self) -> range:
        return range(self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def embed(self, n: int) -> int:
        return n % self.p

    def zero(self):
        return 0


def is_irreducible_mod_p(m: Sequence[int], p: int) -> bool:
    """gcd(m, x^(p^i) - x) = 1 for every i < deg m (m monic mod p)."""
    m = pmod(m, p)
    j = len(m) - 1
    if j < 1:
        return False
    if j == 1:
        return True
    xpow = [0, 1]
    for _ in range(1, j):
        xpow = ppowmod(xpow, p, m, p)
        if len(pgcd(m, _psub(xpow, [0, 1], p), p)) > 1:
            return False
    return True


class ExtField:
    """F_{p^j} as F_p[x]/(m) with m the first irreducible monic in lexicographic order.

    Elements are encoded as integers sum c_i p^i (c_i the coefficient of x^i).
    Multiplication uses discrete log tables built from a primitive element.
    """

    MAX_ORDER = 1 << 20

    def __init__(self, p: int, j: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if j < 1:
            raise ValueError("extension degree must be positive")
        self.p, self.j = p, j
        self.q = p**j
        if self.q > self.MAX_ORDER:
            raise BudgetExceeded(f"field of order {self.q} exceeds the table budget")
        self.modulus = self._find_modulus()
        self._build_tables()

    def _find_modulus(self) -> list[int]:
        p, j = self.p, self.j
        if j == 1:
            return [0, 1]
        for tail in itertools.product(range(p), repeat=j):
            m = list(reversed(tail)) + [1]  # lexicographic in (c_{j-1}, ..., c_0)
            if m[0] == 0:
                continue
            if is_irreducible_mod_p(m, p):
                return m
        raise InvariantError("no irreducible polynomial found")  # pragma: no cover

    def _encode(self, coeffs: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(coeffs) + [0] * (self.j - len(coeffs))):
            v = v * self.p + c
        return v

    def _decode(self, v: int) -> list[int]:
        out = []
        for _ in range(self.j):
            v, r = divmod(v, self.p)
            out.append(r)
        return out

    def _build_tables(self):
        q, p = self.q, self.p
        order = q - 1
        for cand in range(1, q):
            ok = True
            for r in _prime_factors(order):
                if self._slow_pow(cand, order // r) == 1:
                    ok = False
                    break
            if ok:
                gen = cand
                break
        else:  # pragma: no cover
            raise InvariantError("no primitive element")
        self.generator = gen
        exp = [0] * (2 * order)
        log = [0] * q
        cur = 1
        for i in range(order):
            exp[i] = cur
            log[cur] = i
            cur = self._slow_mul(cur, gen)
        for i in range(order, 2 * order):
            exp[i] = exp[i - order]
        self._exp, self._log = exp, log
        self._digits = np.array([self._decode(v) for v in range(q)], dtype=np.int64) if q <= 1 << 16 else None
        self._weights = np.array([p**i for i in range(self.j)], dtype=np.int64)

    def _slow_mul(self, a: int, b: int) -> int:
        prod = pmul(self._decode(a), self._decode(b), self.p)
        rem = pdivmod(prod, self.modulus, self.p)[1] if prod else []
        return self._encode(rem)

    def _slow_pow(self, a: int, e: int) -> int:
        r, b = 1, a
        while e:
            if e & 1:
                r = self._slow_mul(r, b)
            e >>= 1
            if e:
                b = self._slow_mul(b, b)
        return r

    def elements(self) -> range:
        return range(self.q)

    def zero(self):
        return 0

    def embed(self, n: int) -> int:
        return n % self.p

    def add(self, a: int, b: int) -> int:
        if self.j == 1:
            return (a + b) % self.p
        p, out, w = self.p, 0, 1
        for _ in range(self.j):
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            out += ((ra + rb) % p) * w
            w *= p
        return out

    def neg(self, a: int) -> int:
        if self.j == 1:
            return -a % self.p
        p, out, w = self.p, 0, 1
        for _ in range(self.j):
            a, r = divmod(a, p)
            out += (-r % p) * w
            w *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def eval_mpoly(self, f: MPoly, point: Sequence[int]) -> int:
        acc = 0
        for e, c in f.terms.items():
            t = self.embed(int(c))
            for x, k in zip(point, e):
                if k:
                    t = self.mul(t, self.pow(x, k))
            acc = self.add(acc, t)
        return acc


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# local counts
# ---------------------------------------------------------------------------

SCAN_LIMIT = 1 << 14


def count_roots_mod_p(coeffs: Sequence[int], p: int) -> int:
    """Distinct roots in F_p of a polynomial that is nonzero mod p."""
    c = pmod(coeffs, p)
    if not c:
        raise ValueError("polynomial vanishes identically mod p")
    if len(c) == 1:
        return 0
    if p < SCAN_LIMIT:
        xs = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for a in reversed(c):
            acc = (acc * xs + a) % p
        return int(np.count_nonzero(acc == 0))
    xp = ppowmod([0, 1], p, c, p)
    return len(pgcd(c, _psub(xp, [0, 1], p), p)) - 1


def local_count_vp(F: _UPoly | Sequence[int], p: int, allow_degenerate: bool = False) -> int:
    """v_p = #{x mod p : F(x) = 0 mod p}; a polynomial vanishing mod p has p roots."""
    coeffs = F.coeffs if isinstance(F, _UPoly) else F
    if any(isinstance(c, Fraction) and c.denominator != 1 for c in coeffs):
        raise ValueError("local counts need integer coefficients")
    if not pmod(coeffs, p):
        if not allow_degenerate:
            raise ValueError("specialization vanishes identically mod p")
        return p
    return count_roots_mod_p(coeffs, p)


# ---------------------------------------------------------------------------
# sieve surface
# ---------------------------------------------------------------------------


def shifted_g(inst: GeneralInstance, h: int, var: str = "z") -> IntPoly1:
    """T_h(z) = (2ab)^(d-1) * h * g((z+h)/(2a), (z-h)/(2b)), an integer polynomial in z."""
    d = inst.d
    a, b = inst.a, inst.b
    scale = (2 * a * b) ** (d - 1)
    u = RatPoly1([Fraction(h, 2 * a), Fraction(1, 2 * a)], var)
    v = RatPoly1([Fraction(-h, 2 * b), Fraction(1, 2 * b)], var)
    acc = RatPoly1([], var)
    for (i, j), c in inst.g.terms.items():
        acc = acc + (u**i) * (v**j) * c
    T = acc * (scale * h)
    try:
        return T.to_int()
    except ValueError as exc:
        raise InvariantError("scaled shift of g is not integral") from exc


def difference_quotient(T: _UPoly, vars=("x", "y")) -> MPoly:
    """(T(x) - T(y)) / (x - y) as an exact polynomial."""
    terms: dict = {}
    for n, c in enumerate(T.coeffs):
        if n == 0 or c == 0:
            continue
        for i in range(n):
            e = (i, n - 1 - i)
            terms[e] = terms.get(e, 0) + c
    return MPoly(terms, vars)


@dataclass(frozen=True)
class SieveSurface:
    """K_h(x,y,z,w), P_h(x,y,w) and the shift polynomial T_h(z) for one h."""

    inst: GeneralInstance
    h: int
    K: MPoly
    P: MPoly
    T: IntPoly1
    scale: int

    @property
    def d(self) -> int:
        return self.inst.d

    def detection_poly(self, X1: int, X2: int) -> IntPoly1:
        """F(x; X1, X2) = K_h(X1, X2, x, 1)."""
        base = self.scale * (self.inst.f(X1, X2) - self.inst.k)
        return IntPoly1([base - self.T.coeff(0)] + [-c for c in self.T.coeffs[1:]], "x")

    def leading_coefficient(self) -> int:
        return -self.T.lc


def build_sieve_surface(inst: GeneralInstance, h: int) -> SieveSurface:
    """K_h is the projectivisation of (2ab)^(d-1) (f(x,y) - k) - T_h(z);
    P_h is the projectivisation of (T_h(x) - T_h(y)) / (x - y)."""
    if h == 0:
        raise ValueError("h must be nonzero")
    d = inst.d
    scale = (2 * inst.a * inst.b) ** (d - 1)
    T = shifted_g(inst, h)
    vars3 = ("x", "y", "z")
    fx = MPoly({e + (0,): c for e, c in inst.f.terms.items()}, vars3)
    Tz = MPoly({(0, 0, i): c for i, c in enumerate(T.coeffs) if c}, vars3)
    Kaff = fx * scale - MPoly.const(scale * inst.k, vars3) - Tz
    K = Kaff.homogenize("w", d)
    Paff = difference_quotient(T)
    P = Paff.homogenize("w", max(d - 2, 0))
    # exactness check of the (x - y) cofactor
    vars2 = ("x", "y")
    lhs = Paff * MPoly({(1, 0): 1, (0, 1): -1}, vars2)
    rhs = MPoly({(i, 0): c for i, c in enumerate(T.coeffs) if c}, vars2) - MPoly(
        {(0, i): c for i, c in enumerate(T.coeffs) if c}, vars2
    )
    if lhs != rhs:
        raise InvariantError("P_h cofactor check failed")
    return SieveSurface(inst, h, K, P, T, scale)


@lru_cache(maxsize=512)
def _value_root_table(surface: SieveSurface, p: int) -> np.ndarray:
    """R[u] = #{z mod p : T_h(z) = u mod p}."""
    zs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(surface.T.coeffs):
        acc = (acc * zs + (c % p)) % p
    return np.bincount(acc, minlength=p).astype(np.int64)


def poly_grid_mod(F: MPoly, n: int) -> np.ndarray:
    """F(x, y) mod n for all residues x, y (an n-by-n int64 array)."""
    xs = np.arange(n, dtype=np.int64)
    deg_x = max(F.degree_in(F.vars[0]), 0)
    deg_y = max(F.degree_in(F.vars[1]), 0)
    px = [np.ones(n, dtype=np.int64)]
    for _ in range(deg_x):
        px.append(px[-1] * xs % n)
    py = [np.ones(n, dtype=np.int64)]
    for _ in range(deg_y):
        py.append(py[-1] * xs % n)
    out = np.zeros((n, n), dtype=np.int64)
    for (i, j), c in F.terms.items():
        out = (out + (int(c) % n) * np.outer(px[i], py[j]) % n) % n
    return out


@lru_cache(maxsize=512)
def vp_table(surface: SieveSurface, p: int) -> np.ndarray:
    """v_p(x, y) for all x, y mod p (degenerate specializations count p roots)."""
    u = (surface.scale * (poly_grid_mod(surface.inst.f, p) - surface.inst.k % p)) % p
    R = _value_root_table(surface, p)
    return R[u]


# ---------------------------------------------------------------------------
# exponential sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpSumValue:
    real: float
    imag: float
    exact_integer: int | None = None
    terms: int = 0
    kind: str = ""

    def __complex__(self):
        return complex(self.real, self.imag)

    @property
    def value(self) -> complex:
        return complex(self.real, self.imag)

    def check_exact(self, scale: float = 1.0) -> bool:
        if self.exact_integer is None:
            return True
        return abs(self.value - self.exact_integer) <= 1e-6 * max(scale, 1.0)


@lru_cache(maxsize=256)
def roots_of_unity(n: int) -> np.ndarray:
    """exp(2 pi i k / n) for k = 0..n-1 from one fundamental angle."""
    theta = 2 * math.pi / n
    k = np.arange(n)
    return np.cos(theta * k) + 1j * np.sin(theta * k)


def kahan_sum(values) -> complex:
    """Compensated summation of complex values."""
    sr = cr = si = ci = 0.0
    for v in values:
        y = v.real - cr
        t = sr + y
        cr = (t - sr) - y
        sr = t
        y = v.imag - ci
        t = si + y
        ci = (t - si) - y
        si = t
    return complex(sr, si)


def _weighted_character_sum(weights: np.ndarray, M: int, N: int, n: int) -> complex:
    """sum_{x,y mod n} weights[x,y] e((M x + N y)/n), Kahan-compensated."""
    zeta = roots_of_unity(n)
    xs = np.arange(n, dtype=np.int64)
    idx = ((M % n) * xs[:, None] + (N % n) * xs[None, :]) % n
    mask = weights != 0
    vals = weights[mask] * zeta[idx[mask]]
    return kahan_sum(vals.tolist())


def sigma_t(t: int, p: int, M: int, N: int, surface: SieveSurface) -> ExpSumValue:
    """Sigma_t(p; M, N) = sum_{x,y in F_p} v_p(x,y)^t e((Mx + Ny)/p)."""
    if not 0 <= t <= 4:
        raise ValueError("t must lie in 0..4")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    V = vp_table(surface, p).astype(np.int64) ** t
    exact = int(V.sum()) if (M % p == 0 and N % p == 0) else None
    if exact is not None:
        return ExpSumValue(float(exact), 0.0, exact, p * p, "sigma")
    z = _weighted_character_sum(V, M, N, p)
    return ExpSumValue(z.real, z.imag, None, p * p, "sigma")


def character_table(weights: np.ndarray, n: int) -> np.ndarray:
    """All sums sum_{x,y} weights[x,y] e((Mx+Ny)/n) as an n-by-n table indexed [M, N]."""
    zeta = roots_of_unity(n)
    xs = np.arange(n, dtype=np.int64)
    W = zeta[np.outer(xs, xs) % n]
    return W @ weights.astype(complex) @ W.T


@lru_cache(maxsize=256)
def sigma_table(t: int, p: int, surface: SieveSurface) -> np.ndarray:
    V = vp_table(surface, p).astype(np.int64) ** t
    return character_table(V, p)


@lru_cache(maxsize=1024)
def phi_solutions(inst: GeneralInstance, h: int) -> np.ndarray:
    """0/1 indicator of (2ab)^(d-1) (f(x,y) - k) = 0 mod h over residues mod h."""
    h = abs(h)
    if h == 0:
        raise ValueError("h must be nonzero")
    if h == 1:
        return np.ones((1, 1), dtype=np.int64)
    scale = (2 * inst.a * inst.b) ** (inst.d - 1) % h
    vals = (scale * (poly_grid_mod(inst.f, h) - inst.k % h)) % h
    return (vals == 0).astype(np.int64)


def phi_sum(h: int, M: int, N: int, inst: GeneralInstance) -> ExpSumValue:
    """Phi(h; M, N): character sum over the congruenced residue set mod |h|."""
    if h < 1:
        raise ValueError("h must be positive")
    S = phi_solutions(inst, h)
    if M % h == 0 and N % h == 0:
        n = int(S.sum())
        return ExpSumValue(float(n), 0.0, n, h * h, "phi")
    z = _weighted_character_sum(S, M, N, h)
    return ExpSumValue(z.real, z.imag, None, h * h, "phi")


@lru_cache(maxsize=256)
def phi_table(h: int, inst: GeneralInstance) -> np.ndarray:
    return character_table(phi_solutions(inst, h), abs(h))


def _check_coprime(p: int, q: int, h: int):
    if h == 0:
        raise ValueError("h must be nonzero")
    if math.gcd(p * q, h) != 1:
        raise ValueError(f"gcd(pq, h) must be 1 (p={p}, q={q}, h={h})")


def psi_weights(i: int, j: int, p: int, q: int, h: int, surface: SieveSurface) -> np.ndarray:
    """v_p(r,s)^i v_q(r,s)^j 1[congruence mod |h|] over residues r, s mod pq|h|."""
    _check_coprime(p, q, h)
    L = p * q * abs(h)
    r = np.arange(L, dtype=np.int64)
    Vp = vp_table(surface, p).astype(np.int64) ** i
    Vq = vp_table(surface, q).astype(np.int64) ** j
    S = phi_solutions(surface.inst, abs(h))
    hp = abs(h)
    return Vp[np.ix_(r % p, r % p)] * Vq[np.ix_(r % q, r % q)] * S[np.ix_(r % hp, r % hp)]


def psi_direct(i: int, j: int, m: int, n: int, p: int, q: int, h: int, surface: SieveSurface) -> ExpSumValue:
    """Psi_{i,j}(m, n) by direct summation over residues mod pq|h|."""
    W = psi_weights(i, j, p, q, h, surface)
    L = W.shape[0]
    if m % L == 0 and n % L == 0:
        v = int(W.sum())
        return ExpSumValue(float(v), 0.0, v, L * L, "psi")
    zeta = roots_of_unity(L)
    r = np.arange(L, dtype=np.int64)
    row = zeta[(m % L) * r % L]
    col = zeta[(n % L) * r % L]
    z = complex(row @ W.astype(complex) @ col)
    return ExpSumValue(z.real, z.imag, None, L * L, "psi")


def psi_direct_rows(i, j, ms: Sequence[int], p, q, h, surface) -> np.ndarray:
    """Psi_{i,j}(m, n) for the given m values and every n mod pq|h| (rows indexed like ms)."""
    W = psi_weights(i, j, p, q, h, surface).astype(complex)
    L = W.shape[0]
    zeta = roots_of_unity(L)
    r = np.arange(L, dtype=np.int64)
    R = zeta[np.outer(np.asarray(ms, dtype=np.int64) % L, r) % L]
    C = zeta[np.outer(r, r) % L]
    return (R @ W) @ C


def psi_factored(i: int, j: int, m: int, n: int, p: int, q: int, h: int, surface: SieveSurface) -> complex:
    """Psi_{i,j}(m, n) through the CRT factorisation into Sigma and Phi sums."""
    _check_coprime(p, q, h)
    hp = abs(h)
    inst = surface.inst
    if p != q:
        pq_bar = pow(p * q, -1, hp) if hp > 1 else 0
        h_bar = pow(hp, -1, p * q)
        p_prime = pow(p, -1, q)  # p p' + q q' = 1
        q_prime = (1 - p * p_prime) // q
        s1 = sigma_table(i, p, surface)[(h_bar * q_prime * m) % p, (h_bar * q_prime * n) % p]
        s2 = sigma_table(j, q, surface)[(h_bar * p_prime * m) % q, (h_bar * p_prime * n) % q]
        ph = phi_table(hp, inst)[(pq_bar * m) % hp, (pq_bar * n) % hp] if hp > 1 else 1.0
        return complex(s1 * s2 * ph)
    if m % p or n % p:
        return 0j
    m1, n1 = m // p, n // p
    p_bar = pow(p, -1, hp) if hp > 1 else 0
    h_bar = pow(hp, -1, p)
    s = sigma_table(i + j, p, surface)[(h_bar * m1) % p, (h_bar * n1) % p]
    ph = phi_table(hp, inst)[(p_bar * m1) % hp, (p_bar * n1) % hp] if hp > 1 else 1.0
    return complex(p * p * s * ph)


def psi_factored_table(i: int, j: int, p: int, q: int, h: int, surface: SieveSurface) -> np.ndarray:
    """Factorised Psi_{i,j}(m, n) for all m, n mod pq|h| (table indexed [m, n])."""
    _check_coprime(p, q, h)
    hp = abs(h)
    L = p * q * hp
    r = np.arange(L, dtype=np.int64)
    inst = surface.inst
    Ph = phi_table(hp, inst) if hp > 1 else np.ones((1, 1), dtype=complex)
    if p != q:
        pq_bar = pow(p * q, -1, hp) if hp > 1 else 0
        h_bar = pow(hp, -1, p * q)
        p_prime = pow(p, -1, q)
        q_prime = (1 - p * p_prime) // q
        S1 = sigma_table(i, p, surface)
        S2 = sigma_table(j, q, surface)
        a1 = (h_bar * q_prime * r) % p
        a2 = (h_bar * p_prime * r) % q
        a3 = (pq_bar * r) % hp
        return S1[np.ix_(a1, a1)] * S2[np.ix_(a2, a2)] * Ph[np.ix_(a3, a3)]
    p_bar = pow(p, -1, hp) if hp > 1 else 0
    h_bar = pow(hp, -1, p)
    S = sigma_table(i + j, p, surface)
    r1 = r // p
    a1 = (h_bar * r1) % p
    a3 = (p_bar * r1) % hp
    out = p * p * S[np.ix_(a1, a1)] * Ph[np.ix_(a3, a3)]
    mask = (r % p) == 0
    return out * np.outer(mask, mask)


# ---------------------------------------------------------------------------
# point counts and moment statistics
# ---------------------------------------------------------------------------


@dataclass
class MomentResult:
    counts: dict
    expected: float
    moment: float
    points: int


def moment_statistic(
    field_: ExtField | PrimeField,
    F: MPoly,
    constraints: Sequence[MPoly] = (),
    expected: float | None = None,
    budget: int = 2_000_000,
) -> MomentResult:
    """N(tau) = #{points with all constraints zero and F = tau}; returns the table and
    sum_tau |N(tau) - expected|^2 (expected defaults to the mean of N)."""
    nv = len(F.vars)
    q = field_.q
    if q**nv > budget:
        raise BudgetExceeded(f"{q}^{nv} points exceed the enumeration budget")
    ev = field_.eval_mpoly if isinstance(field_, ExtField) else (lambda f, pt: int(f(*pt)) % field_.p)
    counts = {tau: 0 for tau in field_.elements()}
    for pt in itertools.product(range(q), repeat=nv):
        if all(ev(G, pt) == 0 for G in constraints):
            counts[ev(F, pt)] += 1
    total = sum(counts.values())
    mean = total / q if expected is None else expected
    moment = sum((c - mean) ** 2 for c in counts.values())
    return MomentResult(counts, mean, moment, total)


def affine_point_count(F: MPoly, p: int) -> int:
    """#{x in F_p^n : F(x) = 0} by vectorized enumeration (n <= 4)."""
    n = len(F.vars)
    if p**n > 50_000_000:
        raise BudgetExceeded("enumeration too large")
    grids = np.meshgrid(*[np.arange(p, dtype=np.int64)] * n, indexing="ij")
    acc = np.zeros(grids[0].shape, dtype=np.int64)
    for e, c in F.terms.items():
        term = np.full(acc.shape, int(c) % p, dtype=np.int64)
        for g, k in zip(grids, e):
            for _ in range(k):
                term = term * g % p
        acc = (acc + term) % p
    return int(np.count_nonzero(acc == 0))


def weierstrass_point_count(a: int, b: int, p: int) -> tuple[int, int]:
    """(affine points, projective points) of y^2 = x^3 + a x + b over F_p."""
    squares = np.zeros(p, dtype=np.int64)
    ys = np.arange(p, dtype=np.int64)
    np.add.at(squares, ys * ys % p, 1)
    xs = np.arange(p, dtype=np.int64)
    rhs = (xs * xs % p * xs + a * xs + b) % p
    affine = int(squares[rhs].sum())
    return affine, affine + 1


def surface_cone_count(surface: SieveSurface, p: int) -> int:
    """#{(x,y,z,w) in F_p^4 : K_h = 0}, using the split K_h = A(x,y,w) - T(z,w)."""
    K = surface.K
    total = 0
    xs = np.arange(p, dtype=np.int64)
    for w in range(p):
        Kw = K.specialize({"w": w})  # in (x, y, z)
        A = MPoly({(i, j): c for (i, j, k), c in Kw.terms.items() if k == 0}, ("x", "y"))
        Tz = {k: c for (i, j, k), c in Kw.terms.items() if i == 0 and j == 0 and k > 0}
        a_vals = poly_grid_mod(A, p).ravel() if A.terms else np.zeros(p * p, dtype=np.int64)
        t_vals = np.zeros(p, dtype=np.int64)
        for k, c in Tz.items():
            t_vals = (t_vals + (int(c) % p) * (xs ** k % p)) % p
        ha = np.bincount(a_vals % p, minlength=p)
        ht = np.bincount((-t_vals) % p, minlength=p)
        total += int(np.dot(ha, ht))
    return total


def sigma_split_constants(t: int) -> tuple[int, int]:
    """(c_t, d_t): t-tuples with exactly 2 (resp. 3) distinct entries, per ordered
    pair (resp. triple) of distinct values, found by exhaustive enumeration."""
    def surjective(s):
        return sum(1 for tup in itertools.product(range(s), repeat=t) if len(set(tup)) == s)

    c = surjective(2) // math.factorial(2)
    d = surjective(3) // math.factorial(3)
    return c, d
