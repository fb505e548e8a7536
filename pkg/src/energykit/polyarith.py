"""Exact polynomial arithmetic over the integers and rationals.

Univariate polynomials are dense coefficient tuples (index = degree);
multivariate polynomials are sparse maps from exponent tuples to
coefficients.  Every value is immutable and every operation is exact.

Also here: a small expression parser with a canonical printer,
Sylvester resultants evaluated by fraction-free (Bareiss) elimination,
discriminants of polynomials whose coefficients depend on a parameter,
exact integer root extraction, and arithmetic in quotient rings
Q[y]/(m) with m squarefree.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Callable, Iterable, Sequence

from .errors import InvariantError, ParseError

Number = int | Fraction


def _is_int(c) -> bool:
    return type(c) is int or (isinstance(c, Fraction) and c.denominator == 1)


def _to_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------


class _UPoly:
    """Shared dense univariate machinery; subclasses fix the coefficient ring."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        cs = [self._coerce(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    @staticmethod
    def _coerce(c):
        raise NotImplementedError

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self):
        if not self.coeffs:
            return 0
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __call__(self, x):
        """Horner evaluation; works for any ring element supporting + and *."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, _UPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == ((other,) if other != 0 else ())
        return NotImplemented

    def __hash__(self):
        return hash(("UPoly", self.coeffs))

    def __repr__(self):
        return f"{type(self).__name__}({list(self.coeffs)!r}, var={self.var!r})"

    def __str__(self):
        terms = {(i,): c for i, c in enumerate(self.coeffs) if c != 0}
        return format_terms(terms, (self.var,))

    # -- ring operations ---------------------------------------------------
    def _wrap(self, coeffs, other=None):
        rational = isinstance(self, RatPoly1) or isinstance(other, (RatPoly1, Fraction))
        if not rational:
            rational = any(isinstance(c, Fraction) and c.denominator != 1 for c in coeffs)
        cls = RatPoly1 if rational else IntPoly1
        return cls(coeffs, self.var)

    def _other(self, other):
        if isinstance(other, _UPoly):
            return other.coeffs
        if isinstance(other, (int, Fraction)):
            return (other,)
        return None

    def __add__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        n = max(len(self.coeffs), len(oc))
        out = [self.coeff(i) + (oc[i] if i < len(oc) else 0) for i in range(n)]
        return self._wrap(out, other)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap([-c for c in self.coeffs])

    def __sub__(self, other):
        oc = self._other(other)
        if oc is None:
            return NotImplemented
        n = max(len(self.coeffs), len(oc))
        out = [self.coeff(i) - (oc[i] if i < len(oc) else 0) for i in range(n)]
        return self._wrap(out, other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._wrap([c * other for c in self.coeffs], other)
        if not isinstance(other, _UPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return self._wrap([], other)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return self._wrap(out, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = self._wrap([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- calculus and composition -----------------------------------------
    def derivative(self, order: int = 1):
        p = self
        for _ in range(order):
            p = p._wrap([i * c for i, c in enumerate(p.coeffs)][1:])
        return p

    def compose(self, inner):
        """self(inner(x)) by Horner in the polynomial ring."""
        acc = inner._wrap([]) if isinstance(inner, _UPoly) else 0
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def shift(self, c):
        """Return self(x + c)."""
        return self.compose(self._wrap([c, 1]))

    def scale_var(self, b):
        """Return self(b*x)."""
        out, bp = [], 1
        for c in self.coeffs:
            out.append(c * bp)
            bp *= b
        return self._wrap(out, b if isinstance(b, Fraction) else None)

    def reverse(self, degree: int | None = None):
        """x^n * self(1/x) with n = degree (default: own degree)."""
        n = self.degree if degree is None else degree
        cs = list(self.coeffs) + [0] * (n + 1 - len(self.coeffs))
        return self._wrap(cs[::-1])

    def with_var(self, var: str):
        return type(self)(self.coeffs, var)

    def to_rat(self) -> "RatPoly1":
        return RatPoly1(self.coeffs, self.var)

    def to_int(self) -> "IntPoly1":
        if not all(_is_int(c) for c in self.coeffs):
            raise ValueError("polynomial has non-integral coefficients")
        return IntPoly1([int(c) for c in self.coeffs], self.var)

    def content(self):
        if not self.coeffs:
            raise ValueError("content of the zero polynomial")
        if all(_is_int(c) for c in self.coeffs):
            return reduce(gcd, (abs(int(c)) for c in self.coeffs))
        fr = [_to_fraction(c) for c in self.coeffs]
        num = reduce(gcd, (abs(c.numerator) for c in fr))
        den = reduce(_lcm, (c.denominator for c in fr))
        return Fraction(num, den)

    def primitive(self) -> "IntPoly1":
        """Integer primitive part with positive leading coefficient."""
        if not self.coeffs:
            return IntPoly1([], self.var)
        c = self.content()
        if self.lc < 0:
            c = -c
        return IntPoly1([int(Fraction(x) / c) for x in self.coeffs], self.var)

    # -- division (over Q) -------------------------------------------------
    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = [_to_fraction(c) for c in self.coeffs]
        d = [_to_fraction(c) for c in other.coeffs]
        q = [Fraction(0)] * max(0, len(r) - len(d) + 1)
        inv = 1 / d[-1]
        for i in range(len(r) - len(d), -1, -1):
            coef = r[i + len(d) - 1] * inv
            q[i] = coef
            if coef:
                for j, dj in enumerate(d):
                    r[i + j] -= coef * dj
        r = r[: len(d) - 1]
        return RatPoly1(q, self.var), RatPoly1(r, self.var)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other):
        """Quotient when the division is exact; raises otherwise."""
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        if isinstance(self, IntPoly1) and isinstance(other, IntPoly1):
            try:
                return q.to_int()
            except ValueError:
                return q
        return q

    def monic(self) -> "RatPoly1":
        if self.is_zero():
            return RatPoly1([], self.var)
        inv = Fraction(1) / _to_fraction(self.lc)
        return RatPoly1([c * inv for c in self.coeffs], self.var)


class IntPoly1(_UPoly):
    """Dense univariate polynomial with arbitrary-precision integer coefficients."""

    __slots__ = ()

    @staticmethod
    def _coerce(c):
        if type(c) is int:
            return c
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise ValueError(f"non-integral coefficient {c}")
            return int(c)
        if isinstance(c, bool):
            return int(c)
        try:
            import numbers

            if isinstance(c, numbers.Integral):
                return int(c)
        except ImportError:  # pragma: no cover
            pass
        raise TypeError(f"cannot use {c!r} as an integer coefficient")

    @classmethod
    def from_roots(cls, roots: Sequence[int], lead: int = 1, var: str = "x"):
        p = cls([lead], var)
        for r in roots:
            p = p * cls([-r, 1], var)
        return p


class RatPoly1(_UPoly):
    """Dense univariate polynomial with rational coefficients in lowest terms."""

    __slots__ = ()

    @staticmethod
    def _coerce(c):
        if isinstance(c, Fraction):
            return c
        if isinstance(c, int):
            return Fraction(c)
        raise TypeError(f"cannot use {c!r} as a rational coefficient")


def poly_gcd(a: _UPoly, b: _UPoly) -> RatPoly1:
    """Monic gcd over Q (zero if both inputs are zero)."""
    a, b = a.to_rat(), b.to_rat()
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def poly_xgcd(a: _UPoly, b: _UPoly):
    """Return (g, s, t) with s*a + t*b = g monic, over Q."""
    r0, r1 = a.to_rat(), b.to_rat()
    s0, s1 = RatPoly1([1], a.var), RatPoly1([], a.var)
    t0, t1 = RatPoly1([], a.var), RatPoly1([1], a.var)
    while not r1.is_zero():
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        return r0, s0, t0
    inv = Fraction(1) / r0.lc
    return r0 * inv, s0 * inv, t0 * inv


def squarefree_part(p: _UPoly) -> RatPoly1:
    if p.degree < 1:
        return p.monic()
    return p.exact_div(poly_gcd(p, p.derivative())).monic()


def is_squarefree(p: _UPoly) -> bool:
    return poly_gcd(p, p.derivative()).degree <= 0


# ---------------------------------------------------------------------------
# determinants, resultants, discriminants
# ---------------------------------------------------------------------------


def bareiss_det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    n = len(matrix)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in matrix]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def sylvester_matrix(f: _UPoly, g: _UPoly) -> list[list]:
    """Sylvester matrix with rows of f shifted deg g times, then g shifted deg f times."""
    m, n = f.degree, g.degree
    size = m + n
    fc, gc = f.coeffs[::-1], g.coeffs[::-1]
    rows = []
    for i in range(n):
        rows.append([0] * i + list(fc) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(gc) + [0] * (size - n - 1 - i))
    return rows


def _integral_scale(p: _UPoly) -> tuple[IntPoly1, int]:
    """Return (q, s) with q = s*p integral and s a positive integer."""
    s = reduce(_lcm, (_to_fraction(c).denominator for c in p.coeffs), 1)
    return IntPoly1([int(_to_fraction(c) * s) for c in p.coeffs], p.var), s


def resultant(f: _UPoly, g: _UPoly):
    """Res(f, g) = lc(f)^deg g * prod g(roots of f), via the Sylvester determinant."""
    if f.is_zero() or g.is_zero():
        return 0
    if f.degree == 0 and g.degree == 0:
        return 1
    fi, sf = _integral_scale(f)
    gi, sg = _integral_scale(g)
    r = bareiss_det(sylvester_matrix(fi, gi))
    if sf == 1 and sg == 1:
        return r
    return Fraction(r, sf ** g.degree * sg ** f.degree)


def discriminant(f: _UPoly):
    """(-1)^(d(d-1)/2) Res(f, f')/lc(f); zero exactly when f has a repeated root."""
    if f.is_zero():
        raise ValueError("discriminant of the zero polynomial")
    d = f.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    res = resultant(f, f.derivative())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    val = Fraction(res) * sign / f.lc
    return int(val) if val.denominator == 1 else val


# ---------------------------------------------------------------------------
# multivariate
# ---------------------------------------------------------------------------


def _monomial_str(exps: tuple, names: tuple) -> str:
    parts = []
    for v, e in zip(names, exps):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


def _grlex_key(exps: tuple):
    return (sum(exps), exps)


def format_terms(terms: dict, names: tuple) -> str:
    """Canonical text: graded-lex descending, explicit '*' and '^'."""
    if not terms:
        return "0"
    out = []
    for exps in sorted(terms, key=_grlex_key, reverse=True):
        c = terms[exps]
        mono = _monomial_str(exps, names)
        neg = c < 0
        a = -c if neg else c
        if isinstance(a, Fraction) and a.denominator == 1:
            a = a.numerator
        if not mono:
            body = str(a) if not isinstance(a, Fraction) else f"({a})"
        elif a == 1:
            body = mono
        else:
            coef = str(a) if not isinstance(a, Fraction) else f"({a})"
            body = f"{coef}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


class MPoly:
    """Sparse multivariate polynomial over Z (or Q) in a fixed variable tuple.

    ``terms`` maps exponent tuples (aligned with ``vars``) to nonzero
    coefficients.  Zero coefficients are never stored.
    """

    __slots__ = ("terms", "vars", "_hash")

    def __init__(self, terms: dict | None = None, vars: Sequence[str] = ("x", "y")):
        vs = tuple(vars)
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != len(vs):
                raise ValueError(f"exponent {e} does not match variables {vs}")
            if isinstance(c, Fraction) and c.denominator == 1:
                c = c.numerator
            if c != 0:
                clean[e] = clean.get(e, 0) + c
                if clean[e] == 0:
                    del clean[e]
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    # -- constructors ------------------------------------------------------
    @classmethod
    def const(cls, c, vars):
        return cls({(0,) * len(vars): c} if c else {}, vars)

    @classmethod
    def var(cls, name, vars):
        vars = tuple(vars)
        e = tuple(1 if v == name else 0 for v in vars)
        if name not in vars:
            raise ValueError(f"unknown variable {name!r}")
        return cls({e: 1}, vars)

    @classmethod
    def from_univariate(cls, p: _UPoly, var: str, vars):
        vars = tuple(vars)
        idx = vars.index(var)
        terms = {}
        for i, c in enumerate(p.coeffs):
            if c:
                e = [0] * len(vars)
                e[idx] = i
                terms[tuple(e)] = c
        return cls(terms, vars)

    # -- properties --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var: str) -> int:
        i = self.vars.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def is_integral(self) -> bool:
        return all(_is_int(c) for c in self.terms.values())

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), 0)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            if self.vars == other.vars:
                return self.terms == other.terms
            return self.terms == other.reorder(self.vars).terms if set(self.vars) == set(other.vars) else False
        if isinstance(other, (int, Fraction)):
            return self.terms == MPoly.const(other, self.vars).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.vars, frozenset(self.terms.items()))))
        return self._hash

    def __repr__(self):
        return f"MPoly({str(self)!r}, vars={self.vars!r})"

    def __str__(self):
        return format_terms(self.terms, self.vars)

    # -- ring operations ---------------------------------------------------
    def _coerce_other(self, other):
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.const(other, self.vars)
        return None

    def __add__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return MPoly(t, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return MPoly({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MPoly({e: c * other for e, c in self.terms.items()}, self.vars)
        o = self._coerce_other(other)
        if o is None:
            return NotImplemented
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MPoly(t, self.vars)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = MPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure ---------------------------------------------------------
    def homogeneous_part(self, i: int) -> "MPoly":
        if i < 0:
            raise ValueError("degree must be nonnegative")
        return MPoly({e: c for e, c in self.terms.items() if sum(e) == i}, self.vars)

    def content(self):
        if not self.terms:
            raise ValueError("content of the zero polynomial")
        vals = list(self.terms.values())
        if all(_is_int(c) for c in vals):
            return reduce(gcd, (abs(int(c)) for c in vals))
        fr = [_to_fraction(c) for c in vals]
        return Fraction(reduce(gcd, (abs(c.numerator) for c in fr)), reduce(_lcm, (c.denominator for c in fr)))

    def to_int(self) -> "MPoly":
        if not self.is_integral():
            raise InvariantError(f"non-integral coefficients in {self}")
        return MPoly({e: int(c) for e, c in self.terms.items()}, self.vars)

    def reorder(self, vars: Sequence[str]) -> "MPoly":
        """Re-express in another variable tuple (missing variables must not occur)."""
        vars = tuple(vars)
        for v, col in zip(self.vars, zip(*self.terms) if self.terms else [()] * len(self.vars)):
            if v not in vars and any(col):
                raise ValueError(f"variable {v} occurs but is not in {vars}")
        idx = {v: i for i, v in enumerate(self.vars)}
        t = {}
        for e, c in self.terms.items():
            t[tuple(e[idx[v]] if v in idx else 0 for v in vars)] = c
        return MPoly(t, vars)

    def partial(self, var: str, order: int = 1) -> "MPoly":
        i = self.vars.index(var)
        t = {}
        for e, c in self.terms.items():
            k = e[i]
            if k < order:
                continue
            f = 1
            for j in range(order):
                f *= k - j
            ne = list(e)
            ne[i] = k - order
            t[tuple(ne)] = c * f
        return MPoly(t, self.vars)

    def evaluate(self, values: Sequence, one=1):
        """Evaluate at ring elements (ints, Fractions, polys, AlgebraicElems...)."""
        if len(values) != len(self.vars):
            raise ValueError("wrong number of values")
        if not self.terms:
            return 0 * one
        maxdeg = [max(e[i] for e in self.terms) for i in range(len(self.vars))]
        powers = []
        for v, m in zip(values, maxdeg):
            ps = [one]
            for _ in range(m):
                ps.append(ps[-1] * v)
            powers.append(ps)
        acc = None
        for e in sorted(self.terms, key=_grlex_key, reverse=True):
            term = self.terms[e] * one
            for i, k in enumerate(e):
                if k:
                    term = term * powers[i][k]
            acc = term if acc is None else acc + term
        return acc

    def __call__(self, *values):
        return self.evaluate(values)

    def substitute(self, mapping: dict, new_vars: Sequence[str] | None = None) -> "MPoly":
        """Replace variables by MPolys in ``new_vars`` (unmapped ones are kept)."""
        new_vars = tuple(new_vars) if new_vars is not None else self.vars
        vals = []
        for v in self.vars:
            if v in mapping:
                m = mapping[v]
                vals.append(m if isinstance(m, MPoly) else MPoly.const(m, new_vars))
            else:
                vals.append(MPoly.var(v, new_vars))
        return self.evaluate(vals, one=MPoly.const(1, new_vars))

    def specialize(self, assignment: dict) -> "MPoly":
        """Fix some variables to numbers; the remaining variables keep their order."""
        rest = tuple(v for v in self.vars if v not in assignment)
        idx = [self.vars.index(v) for v in rest]
        t: dict = {}
        for e, c in self.terms.items():
            val = c
            for v, x in assignment.items():
                k = e[self.vars.index(v)]
                if k:
                    val = val * x**k
            ne = tuple(e[i] for i in idx)
            t[ne] = t.get(ne, 0) + val
        return MPoly(t, rest)

    def to_univariate(self, var: str | None = None) -> _UPoly:
        """Convert a polynomial involving at most one variable to IntPoly1/RatPoly1."""
        if var is None:
            used = [v for i, v in enumerate(self.vars) if any(e[i] for e in self.terms)]
            if len(used) > 1:
                raise ValueError(f"polynomial involves {used}")
            var = used[0] if used else self.vars[0]
        i = self.vars.index(var)
        deg = self.degree_in(var)
        cs = [0] * (deg + 1)
        for e, c in self.terms.items():
            if any(k for j, k in enumerate(e) if j != i):
                raise ValueError(f"polynomial involves variables other than {var}")
            cs[e[i]] += c
        if all(_is_int(c) for c in cs):
            return IntPoly1([int(c) for c in cs], var)
        return RatPoly1(cs, var)

    def coefficients_in(self, var: str) -> list["MPoly"]:
        """Coefficients w.r.t. ``var`` as MPolys in the remaining variables."""
        i = self.vars.index(var)
        rest = tuple(v for v in self.vars if v != var)
        deg = self.degree_in(var)
        buckets: list[dict] = [dict() for _ in range(deg + 1)]
        for e, c in self.terms.items():
            buckets[e[i]][e[:i] + e[i + 1 :]] = c
        return [MPoly(b, rest) for b in buckets]

    def homogenize(self, new_var: str, degree: int | None = None) -> "MPoly":
        d = self.total_degree if degree is None else degree
        vars = self.vars + (new_var,)
        return MPoly({e + (d - sum(e),): c for e, c in self.terms.items()}, vars)

    def dehomogenize(self, var: str, value=1) -> "MPoly":
        return self.specialize({var: value})


IntPoly2 = MPoly


def homogeneous_part(f: MPoly, i: int) -> MPoly:
    return f.homogeneous_part(i)


def content(f) -> int:
    return f.content()


def cofactor_by_difference(f: MPoly, x: str = "x", y: str = "y") -> MPoly:
    """Exact quotient f / (x - y); raises if x - y does not divide f."""
    if f.vars != (x, y) and set(f.vars) != {x, y}:
        raise ValueError("expects a polynomial in exactly two variables")
    f = f.reorder((x, y))
    # synthetic division in x with coefficients in Z[y]
    rows = f.coefficients_in(x)  # rows[i](y) coefficient of x^i
    vars1 = (y,)
    yv = MPoly.var(y, vars1)
    deg = len(rows) - 1
    q = [MPoly.const(0, vars1)] * max(deg, 0)
    carry = MPoly.const(0, vars1)
    for i in range(deg, 0, -1):
        carry = rows[i] + carry * yv if i != deg else rows[i]
        q[i - 1] = carry
    rem = rows[0] + carry * yv if deg > 0 else rows[0]
    if not rem.is_zero():
        raise ArithmeticError("x - y does not divide the polynomial")
    terms = {}
    for i, c in enumerate(q):
        for (j,), v in c.terms.items():
            terms[(i, j)] = v
    return MPoly(terms, (x, y))


def binary_form_discriminant(F: MPoly) -> int:
    """Discriminant of a binary form, computed by dehomogenizing at a nonvanishing coordinate."""
    if not F.is_homogeneous() or len(F.vars) != 2:
        raise ValueError("expects a binary form")
    d = F.total_degree
    x, y = F.vars
    if F.coefficient((d, 0)) != 0:
        return discriminant(F.specialize({y: 1}).to_univariate(x))
    if F.coefficient((0, d)) != 0:
        return discriminant(F.specialize({x: 1}).to_univariate(y))
    # y | F: Disc(F) = a_{d-1}^2 Disc(F(x,1)) when F(x,1) has degree d-1
    p = F.specialize({y: 1}).to_univariate(x)
    if p.degree < d - 1:
        return 0
    if p.degree < 1:
        return p.lc**2
    return p.lc**2 * discriminant(p)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

MAX_EXPONENT = 4096


class _Parser:
    def __init__(self, text: str, vars: Sequence[str], max_exponent: int):
        self.text = text
        self.vars = tuple(vars)
        self.max_exponent = max_exponent
        self.toks = self._tokenize()
        self.i = 0

    def _offset(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def _error(self, msg: str, pos: int):
        raise ParseError(msg, self._offset(pos))

    def _tokenize(self):
        toks, t, n = [], self.text, len(self.text)
        i = 0
        while i < n:
            ch = t[i]
            if ch.isspace():
                i += 1
            elif ch.isdigit():
                j = i
                while j < n and t[j].isdigit():
                    j += 1
                toks.append(("int", int(t[i:j]), i))
                i = j
            elif ch.isalpha() or ch == "_":
                j = i
                while j < n and (t[j].isalnum() or t[j] == "_"):
                    j += 1
                toks.append(("name", t[i:j], i))
                i = j
            elif ch in "+-*^()":
                toks.append((ch, ch, i))
                i += 1
            else:
                self._error(f"unexpected character {ch!r}", i)
        toks.append(("end", None, n))
        return toks

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def parse(self) -> MPoly:
        if self.peek()[0] == "end":
            self._error("empty expression", 0)
        e = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            if kind in ("int", "name", "("):
                self._error("expected operator (implicit multiplication is not allowed)", pos)
            self._error(f"unexpected token {self.peek()[1]!r}", pos)
        return e

    def expr(self) -> MPoly:
        acc = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> MPoly:
        acc = self.unary()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.unary()
        return acc

    def unary(self) -> MPoly:
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> MPoly:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                self._error("exponent must be a nonnegative integer literal", pos)
            if val > self.max_exponent:
                self._error(f"exponent {val} exceeds limit {self.max_exponent}", pos)
            if self.peek()[0] == "^":
                self._error("chained exponents need parentheses", self.peek()[2])
            return base**val
        return base

    def atom(self) -> MPoly:
        kind, val, pos = self.take()
        if kind == "int":
            return MPoly.const(val, self.vars)
        if kind == "name":
            if val not in self.vars:
                self._error(f"unknown variable {val!r}", pos)
            return MPoly.var(val, self.vars)
        if kind == "(":
            e = self.expr()
            k2, _, p2 = self.take()
            if k2 != ")":
                self._error("expected ')'", p2)
            return e
        if kind == "end":
            self._error("unexpected end of input", pos)
        self._error(f"unexpected token {val!r}", pos)


def parse_poly(text: str, vars: Sequence[str] = ("x", "y"), max_exponent: int = MAX_EXPONENT) -> MPoly:
    """Parse an integer polynomial expression in the given variables.

    Grammar: integers, variable names, binary + - *, ^ with a nonnegative
    integer literal exponent, parentheses, and unary minus (which binds
    looser than ^, so -x^2 is -(x^2)).  Multiplication must be explicit.
    """
    return _Parser(text, vars, max_exponent).parse()


def parse_univariate(text: str, var: str = "x") -> IntPoly1:
    return parse_poly(text, (var,)).to_univariate(var)


def format_poly(p) -> str:
    return str(p)


# ---------------------------------------------------------------------------
# interpolation and parametric discriminants
# ---------------------------------------------------------------------------


def interpolate(xs: Sequence[int], ys: Sequence, var: str = "n") -> RatPoly1:
    """Exact Newton interpolation through the points (xs[i], ys[i])."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = RatPoly1([coef[-1]], var)
    for i in range(n - 2, -1, -1):
        poly = poly * RatPoly1([-xs[i], 1], var) + coef[i]
    return poly


class ParamPoly:
    """Polynomial in a main variable whose coefficients are IntPoly1 in a parameter."""

    __slots__ = ("coeffs", "var", "param")

    def __init__(self, coeffs: Sequence[IntPoly1], var: str = "t", param: str = "n"):
        cs = [c if isinstance(c, _UPoly) else IntPoly1([c], param) for c in coeffs]
        cs = [c.with_var(param) for c in cs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "param", param)

    def __setattr__(self, name, value):
        raise AttributeError("immutable")

    @classmethod
    def from_mpoly(cls, F: MPoly, var: str, param: str) -> "ParamPoly":
        if set(F.vars) - {var, param}:
            extra = [v for v in F.vars if v not in (var, param) and F.degree_in(v) > 0]
            if extra:
                raise ValueError(f"unexpected variables {extra}")
        rows = F.coefficients_in(var)
        cs = []
        for r in rows:
            r2 = r.specialize({v: 0 for v in r.vars if v != param}) if len(r.vars) > 1 else r
            cs.append(r2.to_univariate(param) if r2.vars else IntPoly1([r2.coefficient(())], param))
        return cls(cs, var, param)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def param_degree(self) -> int:
        return max((c.degree for c in self.coeffs), default=-1)

    def specialize(self, value) -> _UPoly:
        vals = [c(value) for c in self.coeffs]
        if all(_is_int(v) for v in vals):
            return IntPoly1([int(v) for v in vals], self.var)
        return RatPoly1(vals, self.var)

    def is_param_free(self) -> bool:
        return all(c.degree <= 0 for c in self.coeffs)


def interpolate_in_param(
    fn: Callable[[int], Number],
    degree_bound: int,
    avoid: Callable[[int], bool] = lambda v: False,
    var: str = "n",
    start: int = 0,
    extra_checks: int = 2,
) -> IntPoly1:
    """Recover an integer polynomial from values at integer points.

    Samples ``degree_bound + 1`` points (skipping those flagged by ``avoid``)
    and verifies the result at ``extra_checks`` further points.
    """
    xs, ys = [], []
    v = start
    tries = 0
    while len(xs) < degree_bound + 1 + extra_checks:
        if not avoid(v):
            xs.append(v)
            ys.append(fn(v))
        v += 1
        tries += 1
        if tries > 50 * (degree_bound + 10):
            raise ValueError("could not find enough nondegenerate sample points")
    k = degree_bound + 1
    poly = interpolate(xs[:k], ys[:k], var)
    for x, y in zip(xs[k:], ys[k:]):
        if poly(x) != y:
            raise InvariantError("interpolated polynomial fails a verification point; degree bound too small")
    try:
        return poly.to_int()
    except ValueError as exc:
        raise InvariantError("interpolated polynomial is not integral") from exc


def disc_in_param(F: ParamPoly) -> IntPoly1:
    """Discriminant of F in its main variable, as an exact polynomial in the parameter.

    Evaluates at integer parameter values 0, 1, 2, ... skipping those where
    the main-variable degree drops, then interpolates.  The degree bound
    (2*deg - 1) * max(deg, parameter degree) dominates the true degree
    (2*deg - 2) * (parameter degree).
    """
    d = F.degree
    if d < 1:
        raise ValueError("main-variable degree must be at least 1")
    if F.is_param_free():
        return IntPoly1([discriminant(F.specialize(0))], F.param)
    lead = F.coeffs[-1]
    e = F.param_degree()
    bound = (2 * d - 1) * max(d, e)

    def avoid(v):
        return lead(v) == 0

    sampled = [v for v in range(0, 4 * bound + 8) if not avoid(v)]
    if not sampled:
        raise ValueError("all sampled parameter values are degenerate")
    return interpolate_in_param(lambda v: discriminant(F.specialize(v)), bound, avoid, F.param)


def resultant_in_param(F: ParamPoly, G: ParamPoly) -> IntPoly1:
    """Res_var(F, G) as a polynomial in the shared parameter."""
    if F.param != G.param:
        raise ValueError("parameter mismatch")
    if F.is_param_free() and G.is_param_free():
        return IntPoly1([resultant(F.specialize(0), G.specialize(0))], F.param)
    bound = G.degree * max(F.param_degree(), 0) + F.degree * max(G.param_degree(), 0)

    def avoid(v):
        return F.coeffs[-1](v) == 0 or G.coeffs[-1](v) == 0

    return interpolate_in_param(lambda v: resultant(F.specialize(v), G.specialize(v)), bound, avoid, F.param)


# ---------------------------------------------------------------------------
# exact integer roots
# ---------------------------------------------------------------------------


def _sturm_chain(p: IntPoly1) -> list[IntPoly1]:
    """Sturm sequence, each member rescaled by a positive rational to be integral."""
    chain = [p.to_rat()]
    nxt = p.derivative().to_rat()
    while not nxt.is_zero():
        chain.append(nxt)
        nxt = -(chain[-2] % chain[-1])
    out = []
    for q in chain:
        qi, _ = _integral_scale(q)
        g = qi.content() if not qi.is_zero() else 1
        out.append(IntPoly1([c // g for c in qi.coeffs], p.var))
    return out


def _sign_changes(chain: list[IntPoly1], x: int) -> int:
    prev, count = 0, 0
    for q in chain:
        v = q(x)
        if v != 0:
            s = 1 if v > 0 else -1
            if prev and s != prev:
                count += 1
            prev = s
    return count


def cauchy_bound(p: _UPoly) -> int:
    """Integer bound on the absolute value of every complex root."""
    lc = abs(_to_fraction(p.lc))
    m = max((abs(_to_fraction(c)) for c in p.coeffs[:-1]), default=Fraction(0))
    b = 1 + m / lc
    return int(b) + 1


def integer_roots(p: _UPoly, lo: int | None = None, hi: int | None = None) -> list[int]:
    """Distinct integer roots of a nonzero polynomial in [lo, hi], exactly.

    Real roots are isolated with a Sturm sequence of the squarefree part
    and bisected down to unit intervals; candidates are then confirmed by
    exact evaluation.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has every integer as a root")
    if p.degree < 1:
        return []
    pi, _ = _integral_scale(p)
    # fast path: strip the power of x
    roots: list[int] = []
    k = 0
    while pi.coeffs[k] == 0:
        k += 1
    if k:
        pi = IntPoly1(pi.coeffs[k:], p.var)
    if k and (lo is None or lo <= 0) and (hi is None or hi >= 0):
        roots.append(0)
    if pi.degree >= 1:
        if pi.degree == 1:
            a0, a1 = pi.coeffs
            if a0 % a1 == 0:
                r = -a0 // a1
                if (lo is None or r >= lo) and (hi is None or r <= hi):
                    roots.append(r)
        else:
            sq = squarefree_part(pi)
            sq_int, _ = _integral_scale(sq)
            b = cauchy_bound(sq_int)
            a = -b if lo is None else max(lo, -b)
            c = b if hi is None else min(hi, b)
            if a <= c:
                chain = _sturm_chain(sq_int)
                _isolate(sq_int, chain, a - 1, c, _sign_changes(chain, a - 1), _sign_changes(chain, c), roots)
    return sorted(set(roots))


def _isolate(p, chain, a, b, va, vb, out):
    """Collect integer roots in (a, b] given sign-variation counts at a and b."""
    n = va - vb
    if n <= 0:
        return
    if b - a == 1:
        if p(b) == 0:
            out.append(b)
        return
    if n == 1:
        # a single real root: locate by sign bisection on p itself
        sa = p(a)
        if sa == 0:
            # root at a is outside (a, b]; shift right
            sa = p(a + 1)
            if sa == 0:
                out.append(a + 1)
                return
            a += 1
        lo_, hi_ = a, b
        sb = p(hi_)
        if sb == 0:
            out.append(hi_)
            return
        if (sa > 0) == (sb > 0):
            return
        while hi_ - lo_ > 1:
            mid = (lo_ + hi_) // 2
            sm = p(mid)
            if sm == 0:
                out.append(mid)
                return
            if (sm > 0) == (sa > 0):
                lo_ = mid
            else:
                hi_ = mid
        return
    mid = (a + b) // 2
    vm = _sign_changes(chain, mid)
    _isolate(p, chain, a, mid, va, vm, out)
    _isolate(p, chain, mid, b, vm, vb, out)


# ---------------------------------------------------------------------------
# quotient rings Q[y]/(m)
# ---------------------------------------------------------------------------


class ZeroDivisorError(ArithmeticError):
    """Inversion hit a zero divisor; ``factor`` is a proper monic factor of the modulus."""

    def __init__(self, factor: RatPoly1):
        super().__init__(f"zero divisor modulo a factor {factor}")
        self.factor = factor


class AlgebraicElem:
    """Element of Q[y]/(m(y)) with m monic and squarefree."""

    __slots__ = ("modulus", "value")

    def __init__(self, value, modulus: _UPoly, check: bool = True):
        m = modulus.monic()
        if m.degree < 1:
            raise ValueError("modulus must have positive degree")
        if check and not is_squarefree(m):
            raise ValueError("modulus must be squarefree")
        if isinstance(value, _UPoly):
            v = value.to_rat().with_var(m.var) % m
        else:
            v = RatPoly1([value], m.var)
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "value", v)

    def __setattr__(self, name, value):
        raise AttributeError("immutable")

    @classmethod
    def generator(cls, modulus: _UPoly) -> "AlgebraicElem":
        return cls(RatPoly1([0, 1], modulus.var), modulus)

    def _new(self, v: RatPoly1) -> "AlgebraicElem":
        e = object.__new__(AlgebraicElem)
        object.__setattr__(e, "modulus", self.modulus)
        object.__setattr__(e, "value", v % self.modulus)
        return e

    def _val(self, other):
        if isinstance(other, AlgebraicElem):
            if other.modulus != self.modulus:
                raise ValueError("moduli differ")
            return other.value
        if isinstance(other, (int, Fraction)):
            return RatPoly1([other], self.modulus.var)
        if isinstance(other, _UPoly):
            return other.to_rat().with_var(self.modulus.var)
        return None

    def __add__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return self._new(self.value + v)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.value)

    def __sub__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return self._new(self.value - v)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return self._new(self.value * v)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        r = self._new(RatPoly1([1], self.modulus.var))
        b = self
        while e:
            if e & 1:
                r = r * b
            e >>= 1
            if e:
                b = b * b
        return r

    def inverse(self) -> "AlgebraicElem":
        g, s, _ = poly_xgcd(self.value, self.modulus)
        if g.degree != 0:
            if g.degree < 0:
                raise ZeroDivisionError("inverse of zero")
            raise ZeroDivisorError(g)
        return self._new(s)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._new(self.value * (Fraction(1) / other))
        o = other if isinstance(other, AlgebraicElem) else AlgebraicElem(other, self.modulus, check=False)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def is_rational(self) -> bool:
        return self.value.degree <= 0

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.value.coeff(0) if not self.value.is_zero() else Fraction(0)

    def __eq__(self, other):
        v = self._val(other)
        if v is None:
            return NotImplemented
        return (self.value - v) % self.modulus == RatPoly1([], self.modulus.var)

    def __hash__(self):
        return hash((self.modulus.coeffs, self.value.coeffs))

    def __repr__(self):
        return f"AlgebraicElem({self.value} mod {self.modulus})"

    def restrict(self, factor: _UPoly) -> "AlgebraicElem":
        """Image under Q[y]/(m) -> Q[y]/(factor) for a factor of m."""
        return AlgebraicElem(self.value, factor, check=False)

    def zero_locus(self) -> RatPoly1:
        """Monic factor of the modulus on whose roots this element vanishes."""
        return poly_gcd(self.value, self.modulus) if not self.value.is_zero() else self.modulus

    def charpoly(self, var: str = "X") -> RatPoly1:
        """Characteristic polynomial of multiplication by this element (Faddeev-LeVerrier)."""
        n = self.modulus.degree
        basis = [RatPoly1([0] * i + [1], self.modulus.var) for i in range(n)]
        cols = [(self.value * b) % self.modulus for b in basis]
        M = [[cols[j].coeff(i) for j in range(n)] for i in range(n)]
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[n] = Fraction(1)
        Mk = [[Fraction(0)] * n for _ in range(n)]
        ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        c_prev = Fraction(1)
        AM = None
        for k in range(1, n + 1):
            # Mk = A*M_{k-1} + c_{n-k+1} I
            if k == 1:
                Mk = ident
            else:
                Mk = [[AM[i][j] + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
            AM = [[sum(M[i][l] * Mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
            c = -sum(AM[i][i] for i in range(n)) / k
            coeffs[n - k] = c
            c_prev = c
        return RatPoly1(coeffs, var)


def split_modulus(m: _UPoly, factor: _UPoly) -> list[RatPoly1]:
    """Split a squarefree modulus along a factor; returns the nontrivial monic parts."""
    g = poly_gcd(m, factor)
    parts = []
    if g.degree >= 1:
        parts.append(g)
    rest = m.monic().exact_div(g) if g.degree >= 0 and not g.is_zero() else m.monic()
    rest = rest.monic()
    if rest.degree >= 1:
        parts.append(rest)
    return parts


def alg_eval(f: MPoly, *args) -> AlgebraicElem:
    """Evaluate f at quotient-ring elements sharing one modulus (rationals allowed)."""
    mod = next((a.modulus for a in args if isinstance(a, AlgebraicElem)), None)
    if mod is None:
        raise ValueError("at least one argument must be an AlgebraicElem")
    one = AlgebraicElem(RatPoly1([1], mod.var), mod, check=False)
    vals = [a if isinstance(a, AlgebraicElem) else one * a for a in args]
    for v in vals:
        if v.modulus != mod:
            raise ValueError("arguments must share a modulus")
    res = f.evaluate(vals, one=one)
    if not isinstance(res, AlgebraicElem):
        res = one * res
    return res
