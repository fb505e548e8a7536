"""Lines on level sets and on the surfaces Gamma_n, rational-line checks,
singularity censuses for the Gamma, K and P families, and the hypothesis
checker for the general equation.

Gamma_n is the surface f(x1, x2) = (a x3 - b n) g(x3, n) + k in (x1, x2, x3).
Algebraic quantities (slopes, intercepts, levels) live in quotient rings
Q[y]/(m) with m squarefree, so every equality test is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .energy import GeneralInstance, curve_count_in_box
from .errors import InvariantError
from .polyarith import (
    AlgebraicElem,
    IntPoly1,
    MPoly,
    ParamPoly,
    RatPoly1,
    _UPoly,
    alg_eval,
    binary_form_discriminant,
    disc_in_param,
    discriminant,
    integer_roots,
    interpolate_in_param,
    poly_gcd,
    resultant,
    resultant_in_param,
    squarefree_part,
)

# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _primitive_int(p: _UPoly) -> IntPoly1:
    """Integer primitive polynomial with the same roots (positive leading coefficient)."""
    q = p.to_rat()
    den = 1
    for c in q.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in q.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    g = g or 1
    if ints and ints[-1] < 0:
        g = -g
    return IntPoly1([c // g for c in ints], p.var)


def rational_roots(p: _UPoly) -> list[Fraction]:
    """Distinct rational roots of a nonzero polynomial."""
    q = _primitive_int(p)
    if q.degree < 1:
        return []
    n, lead = q.degree, q.lc
    # lead^(n-1) q(X / lead) is monic with integer coefficients
    monic = IntPoly1([c * lead ** (n - 1 - i) if i < n else 1 for i, c in enumerate(q.coeffs)], q.var)
    return sorted({Fraction(r, lead) for r in integer_roots(monic)})


def divisor_roots(p: IntPoly1, lo: int, hi: int, exclude_zero: bool = False) -> list[int]:
    """Integer roots in [lo, hi]: strip the parameter power, then test each candidate
    dividing the constant term."""
    if p.is_zero():
        raise InvariantError("census polynomial vanishes identically")
    cs = list(p.coeffs)
    shift = 0
    while cs[shift] == 0:
        shift += 1
    rest = IntPoly1(cs[shift:], p.var)
    roots = []
    if shift and lo <= 0 <= hi and not exclude_zero:
        roots.append(0)
    c0 = rest.coeffs[0]
    for r in range(lo, hi + 1):
        if r == 0:
            continue
        if c0 % r == 0 and rest(r) == 0:
            roots.append(r)
    return sorted(roots)


def _part(f: MPoly, i: int) -> MPoly:
    return f.homogeneous_part(i)


def _eval_int(F: MPoly, *vals):
    return F(*vals) if not F.is_zero() else 0


# ---------------------------------------------------------------------------
# rational lines in p(x) - p(y) = k
# ---------------------------------------------------------------------------


@dataclass
class LineCheckComponent:
    modulus: RatPoly1  # the alpha values, as roots of this polynomial
    beta: AlgebraicElem
    residual: list  # coefficients of p(t) - p(alpha t + beta) - k
    genuine_part: RatPoly1 | None  # factor of modulus on which all residuals vanish


@dataclass
class LineCheckResult:
    d: int
    k: int
    components: list
    lines: list  # (modulus factor, alpha, beta) for genuine lines

    @property
    def has_line(self) -> bool:
        return bool(self.lines)

    @property
    def rational_lines(self) -> list[tuple[Fraction, Fraction]]:
        out = []
        for mod, alpha, beta in self.lines:
            for r in rational_roots(mod):
                out.append((r, beta.value(r)))
        return sorted(set(out))


def rational_line_check(p: _UPoly, k: int) -> LineCheckResult:
    """Decide whether p(x) - p(y) = k contains a line y = alpha x + beta.

    alpha ranges over the roots of alpha^d = 1, split into alpha = 1 and the
    cyclotomic remainder; beta = a_{d-1} (alpha - 1) / (d a_d); the full
    identity is then tested exactly on each component.
    """
    d = p.degree
    if d < 1:
        raise ValueError("p must be nonconstant")
    ad = Fraction(p.lc)
    ad1 = Fraction(p.coeff(d - 1)) if d >= 1 else Fraction(0)
    mods = [RatPoly1([-1, 1], "y")]
    if d > 1:
        mods.append(RatPoly1([1] * d, "y"))  # (y^d - 1)/(y - 1)
    comps, lines = [], []
    for m in mods:
        alpha = AlgebraicElem.generator(m)
        beta = (alpha - 1) * (ad1 / (d * ad))
        # coefficients in t of p(t) - p(alpha t + beta) - k
        lin = [beta, alpha]
        power = [alpha * 0 + 1]
        acc = [alpha * 0 for _ in range(d + 1)]
        for i, c in enumerate(p.coeffs):
            if i > 0:
                new = [alpha * 0 for _ in range(len(power) + 1)]
                for j, a in enumerate(power):
                    new[j] = new[j] + a * lin[0]
                    new[j + 1] = new[j + 1] + a * lin[1]
                power = new
            for j, a in enumerate(power):
                acc[j] = acc[j] - a * c
            acc[i] = acc[i] + c
        acc[0] = acc[0] - k
        locus = m
        for c in acc:
            if not c.is_zero():
                locus = poly_gcd(locus, c.value) if locus.degree > 0 else locus
        genuine = locus if locus.degree >= 1 else None
        comps.append(LineCheckComponent(m, beta, acc, genuine))
        if genuine is not None:
            lines.append((genuine, alpha.restrict(genuine), beta.restrict(genuine)))
    return LineCheckResult(d, k, comps, lines)


# ---------------------------------------------------------------------------
# level-set lines
# ---------------------------------------------------------------------------


@dataclass
class LineCandidate:
    kind: str  # "slope" or "vertical"
    modulus: RatPoly1 | None
    alpha: AlgebraicElem | None
    beta: AlgebraicElem | None
    gamma: Fraction | None
    level: AlgebraicElem | Fraction
    genuine: bool

    def describe(self) -> str:
        if self.kind == "vertical":
            return f"x = {self.gamma} at level {self.level}"
        return f"y = alpha*x + beta over roots of {self.modulus}; beta = {self.beta.value}; level = {self.level.value}"


def _line_identity(f: MPoly, alpha, beta, level) -> list:
    """Coefficients of f(t, alpha t + beta) - level in t (quotient-ring elements)."""
    one = alpha * 0 + 1
    d = f.total_degree
    lin = [beta, alpha]
    pows = [[one]]
    for _ in range(d):
        prev = pows[-1]
        new = [one * 0 for _ in range(len(prev) + 1)]
        for j, a in enumerate(prev):
            new[j] = new[j] + a * lin[0]
            new[j + 1] = new[j + 1] + a * lin[1]
        pows.append(new)
    acc = [one * 0 for _ in range(d + 1)]
    for (i, j), c in f.terms.items():
        for r, a in enumerate(pows[j]):
            acc[i + r] = acc[i + r] + a * c
    acc[0] = acc[0] - level
    return acc


def classify_level_lines(f: MPoly) -> list[LineCandidate]:
    """All lines contained in some level set f = l, with their levels.

    Slope lines y = alpha x + beta need f_d(1, alpha) = 0 and
    beta (d f_d/dy)(1, alpha) = -f_{d-1}(1, alpha); vertical lines x = gamma
    need f_d(0, 1) = 0.  Each candidate is split into its genuine and refuted
    parts by the exact identity f(t, alpha t + beta) = l.
    """
    d = f.total_degree
    fd = _part(f, d)
    fd1 = _part(f, d - 1)
    if binary_form_discriminant(fd) == 0:
        raise ValueError("top form f_d must be squarefree")
    out: list[LineCandidate] = []
    m = fd.specialize({"x": 1}).to_univariate("y")
    if m.degree >= 1:
        mod = m.monic()
        alpha = AlgebraicElem.generator(mod)
        dfy = fd.partial("y")
        slope_num = alg_eval(fd1, 1, alpha) if not fd1.is_zero() else alpha * 0
        denom = alg_eval(dfy, 1, alpha)
        beta = -slope_num / denom
        level = alg_eval(f, alpha * 0, beta)
        coeffs = _line_identity(f, alpha, beta, level)
        locus = mod
        for c in coeffs:
            if not c.is_zero() and locus.degree > 0:
                locus = poly_gcd(locus, c.value)
        genuine = locus if locus.degree >= 1 else None
        refuted = mod.exact_div(genuine).monic() if genuine is not None else mod
        for part, ok in ((genuine, True), (refuted, False)):
            if part is not None and part.degree >= 1:
                out.append(
                    LineCandidate("slope", part, alpha.restrict(part), beta.restrict(part), None, level.restrict(part), ok)
                )
    if fd.coefficient((0, d)) == 0:
        # f_d(0, 1) = 0: vertical candidate x = gamma
        dfx = fd.partial("x")
        gamma = -Fraction(_eval_int(fd1, 0, 1)) / Fraction(dfx(0, 1))
        level = Fraction(f(gamma, Fraction(0)))
        rows = f.coefficients_in("y")
        ok = all(Fraction(r(gamma) if r.vars else r.coefficient(())) == 0 for r in rows[1:])
        out.append(LineCandidate("vertical", None, None, None, gamma, level, ok))
    return out


def lines_in_level(f: MPoly, k) -> list[LineCandidate]:
    """Genuine lines inside f = k, restricted to the roots where the level equals k."""
    out = []
    for c in classify_level_lines(f):
        if not c.genuine:
            continue
        if c.kind == "vertical":
            if c.level == k:
                out.append(c)
            continue
        diff = c.level - k
        sub = c.modulus if diff.is_zero() else poly_gcd(c.modulus, diff.value)
        if sub.degree >= 1:
            out.append(LineCandidate("slope", sub, c.alpha.restrict(sub), c.beta.restrict(sub), None,
                                     c.level.restrict(sub), True))
    return out


def rational_lines_in_level(f: MPoly, k) -> list[tuple]:
    """Lines over Q inside f = k, as ("slope", alpha, beta) or ("vertical", gamma)."""
    out = []
    for c in lines_in_level(f, k):
        if c.kind == "vertical":
            out.append(("vertical", c.gamma))
            continue
        for r in rational_roots(c.modulus):
            out.append(("slope", r, c.beta.value(r)))
    return out


# ---------------------------------------------------------------------------
# lines on Gamma_n
# ---------------------------------------------------------------------------


@dataclass
class GammaLine:
    case: int  # 1 slope, 2 vertical
    x3: int
    description: str
    points: int


@dataclass
class GammaLineReport:
    n: int
    B: int
    lines: list
    total_points: int
    case3_category: str = "lines with varying x3: at most one integer point each (not enumerated)"

    def to_json(self) -> list[dict]:
        return [
            {"n": self.n, "case": ln.case, "x3": ln.x3, "line": ln.description, "points": ln.points}
            for ln in self.lines
        ]


def _gamma_shift(inst: GeneralInstance, n: int) -> IntPoly1:
    """G_n(t) = (a t - b n) g(t, n) as a polynomial in t."""
    gt = inst.g.specialize({"y": n}).to_univariate("x") if inst.g.degree_in("y") >= 0 else IntPoly1([], "x")
    return (IntPoly1([-inst.b * n, inst.a], "x") * gt).to_int()


@lru_cache(maxsize=64)
def _genuine_candidates(f: MPoly) -> tuple:
    return tuple(c for c in classify_level_lines(f) if c.genuine)


def gamma_n_line_report(inst: GeneralInstance, n: int, B: int) -> GammaLineReport:
    """Lines of Gamma_n lying in planes x3 = const with 1 <= x3 <= B, and their
    integer points with 1 <= x1, x2 <= B."""
    G = _gamma_shift(inst, n)
    if G.is_zero():
        raise ValueError(f"degenerate n={n}: g(., n) vanishes identically")
    cands = _genuine_candidates(inst.f)
    lines: list[GammaLine] = []
    total = 0
    for x3 in range(1, B + 1):
        v = G(x3) + inst.k
        pts: set = set()
        found = []
        for c in cands:
            if c.kind == "vertical":
                if c.level == v:
                    cnt = B if (c.gamma.denominator == 1 and 1 <= c.gamma <= B) else 0
                    if cnt:
                        pts.update((int(c.gamma), x2) for x2 in range(1, B + 1))
                    found.append((2, f"x1 = {c.gamma}", cnt))
                continue
            diff = c.level - v
            sub = c.modulus if diff.is_zero() else poly_gcd(c.modulus, diff.value)
            if sub.degree < 1:
                continue
            alpha, beta = c.alpha.restrict(sub), c.beta.restrict(sub)
            before = len(pts)
            if alpha.is_rational() and beta.is_rational():
                a_, b_ = alpha.rational_value(), beta.rational_value()
                for x1 in range(1, B + 1):
                    x2 = b_ + x1 * a_
                    if x2.denominator == 1 and 1 <= x2 <= B:
                        pts.add((x1, int(x2)))
            else:
                for x1 in range(1, B + 1):
                    cp = (beta + alpha * x1).charpoly("X")
                    for x2 in integer_roots(cp, 1, B):
                        pts.add((x1, x2))
            found.append((1, f"x2 = alpha*x1 + beta over roots of {sub}", len(pts) - before))
        for case, desc, cnt in found:
            lines.append(GammaLine(case, x3, desc, cnt))
        total += len(pts)
    return GammaLineReport(n, B, lines, total)


def rhs_level_counts(inst: GeneralInstance, level: int, Bs: Sequence[int]) -> list[int]:
    """#{(x, y) in [1, B]^2 : (a x - b y) g(x, y) = level} for each B."""
    F = inst.rhs_poly()
    return [curve_count_in_box(F, level, B).count for B in Bs]


# ---------------------------------------------------------------------------
# singularity census
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def critical_value_poly(f: MPoly) -> IntPoly1:
    """Squarefree integer polynomial in u vanishing at every critical value of f.

    Computed as Res_x(Res_y(f - u, f_y), Res_y(f - u, f_x)), a superset of the
    critical values (its roots include every u with a common zero of
    f - u, f_x, f_y)."""
    fx, fy = f.partial("x"), f.partial("y")
    d = f.total_degree

    def as_param(F: MPoly, shift_u: int) -> ParamPoly:
        # polynomial in y with coefficients in x, constant term shifted
        rows = F.coefficients_in("y") if not F.is_zero() else [MPoly.const(0, ("x",))]
        cs = [r.to_univariate("x") if r.vars else IntPoly1([r.coefficient(())], "x") for r in rows]
        if shift_u:
            cs[0] = cs[0] - shift_u
        return ParamPoly([c.with_var("x").to_int() for c in cs], "y", "x")

    def value(u: int) -> int:
        A = resultant_in_param(as_param(f, u), as_param(fy, 0)) if fy.degree_in("y") >= 1 else None
        Bp = resultant_in_param(as_param(f, u), as_param(fx, 0)) if fx.degree_in("y") >= 1 else None
        if A is None:
            A = fy.to_univariate("x") if not fy.is_zero() else IntPoly1([0], "x")
        if Bp is None:
            Bp = fx.to_univariate("x") if not fx.is_zero() else IntPoly1([0], "x")
        return int(resultant(A.with_var("x"), Bp.with_var("x")))

    bound = 2 * d * (d - 1) * max(d - 1, 1) + 2
    poly = interpolate_in_param(value, bound, var="u")
    if poly.is_zero():
        raise InvariantError("critical-value elimination degenerated")
    return _primitive_int(squarefree_part(poly))


def _param_family(inst: GeneralInstance, family: str) -> tuple[ParamPoly, int]:
    """(polynomial in t with coefficients in the parameter, limit-form degree D) without the u-shift."""
    d, a, b = inst.d, inst.a, inst.b
    if family == "gamma":
        vars3 = ("t", "n")
        g3 = MPoly({e: c for e, c in inst.g.terms.items()}, vars3)
        G = MPoly({(1, 0): a, (0, 1): -b}, vars3) * g3
        P = ParamPoly.from_mpoly(G, "t", "n")
        return P, P.degree
    if family == "K":
        T = _shift_family(inst)  # MPoly in (t, h)
        P = ParamPoly.from_mpoly(T, "t", "h")
        return P, P.degree
    raise ValueError(f"unknown family {family}")


def _shift_family(inst: GeneralInstance) -> MPoly:
    """(2ab)^(d-1) h g((t + h)/(2a), (t - h)/(2b)) as an integer polynomial in (t, h)."""
    d, a, b = inst.d, inst.a, inst.b
    scale = (2 * a * b) ** (d - 1)
    vars2 = ("t", "h")
    u = MPoly({(1, 0): Fraction(1, 2 * a), (0, 1): Fraction(1, 2 * a)}, vars2)
    v = MPoly({(1, 0): Fraction(1, 2 * b), (0, 1): Fraction(-1, 2 * b)}, vars2)
    acc = MPoly({}, vars2)
    for (i, j), c in inst.g.terms.items():
        acc = acc + (u**i) * (v**j) * c
    out = acc * MPoly({(0, 1): scale}, vars2)
    if not out.is_integral():
        raise InvariantError("scaled shift family is not integral")
    return out.to_int()


def limit_form(inst: GeneralInstance, family: str) -> IntPoly1:
    """Leading part of the family after scaling the main variable by the parameter."""
    d, a, b = inst.d, inst.a, inst.b
    gd1 = inst.g.homogeneous_part(d - 1)
    if family == "gamma":
        # (a t - b) g_{d-1}(t, 1)
        gt = gd1.specialize({"y": 1}).to_univariate("x")
        return (IntPoly1([-b, a], "t") * gt.with_var("t")).to_int()
    scale = (2 * a * b) ** (d - 1)
    acc = RatPoly1([], "t")
    for (i, j), c in gd1.terms.items():
        acc = acc + RatPoly1([Fraction(1, 2 * a), Fraction(1, 2 * a)], "t") ** i * RatPoly1(
            [Fraction(-1, 2 * b), Fraction(1, 2 * b)], "t"
        ) ** j * c
    acc = acc * scale
    if family == "K":
        return acc.to_int()
    if family == "P":
        return acc.derivative().to_int()
    raise ValueError(f"unknown family {family}")


def gradient_form(inst: GeneralInstance) -> MPoly:
    """(1/a) g_x(x/a, y/b) + (1/b) g_y(x/a, y/b) for g = g_{d-1}, scaled by (ab)^(d-1) to be integral."""
    d, a, b = inst.d, inst.a, inst.b
    gd1 = inst.g.homogeneous_part(d - 1)
    terms: dict = {}
    for part, den in ((gd1.partial("x"), a), (gd1.partial("y"), b)):
        for (i, j), c in part.terms.items():
            coef = Fraction(c) / den / Fraction(a) ** i / Fraction(b) ** j * (a * b) ** (d - 1)
            terms[(i, j)] = terms.get((i, j), 0) + coef
    out = MPoly(terms, ("x", "y"))
    return out.to_int() if out.is_integral() else out


@dataclass
class SingularCensus:
    family: str
    parameter: str
    polynomial: IntPoly1
    roots: list
    leading_coefficient: int
    predicted_leading_coefficient: int
    limit_exponent: int
    exceptional: list = field(default_factory=list)
    critical_values: IntPoly1 | None = None

    @property
    def leading_matches(self) -> bool:
        return self.leading_coefficient == self.predicted_leading_coefficient

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "parameter": self.parameter,
            "disc_degree": self.polynomial.degree,
            "leading_coeff": str(self.leading_coefficient),
            "predicted_leading_coeff": str(self.predicted_leading_coefficient),
            "integer_roots": self.roots,
            "exceptional": self.exceptional,
        }


def family_discriminant(inst: GeneralInstance, family: str, u: int) -> IntPoly1:
    """D(param, u) = Disc_t[F_param(t) + shift - u], with shift k (Gamma) or (2ab)^(d-1) k (K),
    and u scaled by (2ab)^(d-1) for K."""
    P, _ = _param_family(inst, family)
    scale = (2 * inst.a * inst.b) ** (inst.d - 1) if family == "K" else 1
    cs = list(P.coeffs)
    cs[0] = cs[0] + scale * (inst.k - u)
    return disc_in_param(ParamPoly(cs, P.var, P.param))


def singular_census(inst: GeneralInstance, family: str, B: int) -> SingularCensus:
    """Parameter values at which the family member can be singular.

    gamma: Gamma_n^proj, parameter n, roots in [1, B];
    K: K_h, parameter h, roots in [-B, B] minus 0;
    P: P_h, parameter h, polynomial Disc_x[P_h(x, x, 1)], roots in [-B, B] minus 0.
    """
    d = inst.d
    if family == "P":
        T = _shift_family(inst)
        Pt = ParamPoly.from_mpoly(T, "t", "h")
        deriv = ParamPoly([c * i for i, c in enumerate(Pt.coeffs)][1:], "t", "h")
        D = deriv.degree
        if D < 1:
            poly = IntPoly1([1], "h")
        else:
            poly = disc_in_param(deriv)
        lim = limit_form(inst, "P")
        predicted = discriminant(lim) if lim.degree >= 1 else 1
        roots = divisor_roots(poly, -B, B, exclude_zero=True) if poly.degree >= 1 else []
        expo = (D - 1) * (2 * (d - 1) - D) if D >= 1 else 0
        return SingularCensus("P", "h", poly, roots, int(poly.lc), int(predicted), expo)

    P, D = _param_family(inst, family)
    param = P.param
    C = critical_value_poly(inst.f)
    scale = (2 * inst.a * inst.b) ** (d - 1) if family == "K" else 1
    lim = limit_form(inst, family)
    if lim.degree != D:
        raise InvariantError("limit form degree differs from the family degree")
    predicted = int(discriminant(lim))
    expo = (D - 1) * (2 * d - D)

    # leading coefficient of D(param, u) is independent of u: check at two u values
    for u0 in (0, 1):
        Du = family_discriminant(inst, family, u0)
        if Du.degree != expo or Du.lc != predicted:
            raise InvariantError(
                f"leading coefficient of the {family} discriminant is {Du.lc} at degree {Du.degree}, "
                f"expected {predicted} at degree {expo}"
            )

    lead_main = P.coeffs[-1]
    exceptional: list[int] = []
    if family == "gamma":
        # the main-variable degree drops at parameter values where the leading coefficient vanishes
        if lead_main.degree >= 1:
            exceptional = [r for r in integer_roots(lead_main) if 1 <= r <= B]

    def value(v: int) -> int:
        return family_census_value(inst, family, v)

    def avoid(v: int) -> bool:
        return lead_main(v) == 0 or (family == "K" and v == 0)

    bound = max(C.degree, 0) * expo
    if C.degree < 1:
        poly = IntPoly1([1], param)
    else:
        poly = interpolate_in_param(value, bound, avoid, param)
    if poly.is_zero():
        raise InvariantError(f"{family} census vanishes identically: hypotheses violated")
    lo, hi = (1, B) if family == "gamma" else (-B, B)
    roots = divisor_roots(poly, lo, hi, exclude_zero=family != "gamma") if poly.degree >= 1 else []
    if family == "gamma":
        roots = sorted(set(roots) | set(exceptional) | set(_gamma_infinity_values(inst, B)))
    return SingularCensus(family, param, poly, roots, Du_top(inst, family), predicted, expo, exceptional, C)


def Du_top(inst: GeneralInstance, family: str) -> int:
    """Leading parameter coefficient of D(param, u) (independent of u)."""
    return int(family_discriminant(inst, family, 0).lc)


def _gamma_infinity_values(inst: GeneralInstance, B: int) -> list[int]:
    """n in [1, B] for which Gamma_n^proj is singular at (0 : 0 : 1 : 0).

    That point lies on the surface only when g_{d-1}(1, 0) = 0, and is then
    singular exactly when n e_{d-2,1} + e_{d-2,0} = 0, where e_{i,j} is the
    coefficient of x^i y^j in g."""
    d = inst.d
    g = inst.g
    if g.coefficient((d - 1, 0)) != 0:
        return []
    e1, e0 = g.coefficient((d - 2, 1)), g.coefficient((d - 2, 0))
    if e1 == 0:
        if e0 == 0:
            raise InvariantError("Gamma_n is singular at infinity for every n")
        return []
    n = Fraction(-e0, e1)
    return [int(n)] if n.denominator == 1 and 1 <= n <= B else []


def gamma_projective(inst: GeneralInstance, n: int) -> MPoly:
    """Homogeneous equation of Gamma_n^proj in (x1, x2, x3, w)."""
    d = inst.d
    vars4 = ("x1", "x2", "x3", "w")
    fh = MPoly({(i, j, 0, d - i - j): c for (i, j), c in inst.f.terms.items()}, vars4)
    gh = MPoly({}, vars4)
    for (i, j), c in inst.g.terms.items():
        gh = gh + MPoly({(0, 0, i, d - 1 - i): c * n**j}, vars4)
    lin = MPoly({(0, 0, 1, 0): inst.a, (0, 0, 0, 1): -inst.b * n}, vars4)
    return fh - lin * gh - MPoly({(0, 0, 0, d): inst.k}, vars4)


def projective_singular_points_mod_p(F: MPoly, p: int) -> int:
    """Number of points of P^3(F_p) where F and all its partials vanish."""
    nv = len(F.vars)
    polys = [F] + [F.partial(v) for v in F.vars]
    # enumerate normalised representatives: first nonzero coordinate is 1
    reps = []
    for lead in range(nv):
        free = nv - lead - 1
        grids = np.meshgrid(*[np.arange(p, dtype=np.int64)] * free, indexing="ij") if free else []
        cnt = p**free
        cols = []
        for i in range(nv):
            if i < lead:
                cols.append(np.zeros(cnt, dtype=np.int64))
            elif i == lead:
                cols.append(np.ones(cnt, dtype=np.int64))
            else:
                cols.append(grids[i - lead - 1].ravel())
        reps.append(np.stack(cols))
    pts = np.concatenate(reps, axis=1)
    mask = np.ones(pts.shape[1], dtype=bool)
    for G in polys:
        acc = np.zeros(pts.shape[1], dtype=np.int64)
        for e, c in G.terms.items():
            term = np.full(pts.shape[1], int(c) % p, dtype=np.int64)
            for idx, k in enumerate(e):
                for _ in range(k):
                    term = term * pts[idx] % p
            acc = (acc + term) % p
        mask &= acc == 0
        if not mask.any():
            return 0
    return int(mask.sum())


# ---------------------------------------------------------------------------
# hypothesis checker
# ---------------------------------------------------------------------------


@dataclass
class HypothesisReport:
    no_rational_line: bool
    top_form_smooth: bool
    rhs_top_squarefree: bool
    gradient_squarefree: bool | None
    details: dict

    @property
    def all_hold(self) -> bool:
        return (
            self.no_rational_line
            and self.top_form_smooth
            and self.rhs_top_squarefree
            and self.gradient_squarefree is not False
        )


def check_hypotheses(inst: GeneralInstance) -> HypothesisReport:
    """Decide conditions (1)-(4) on f, g, a, b, k exactly."""
    d = inst.d
    fd = inst.f.homogeneous_part(d)
    disc_fd = binary_form_discriminant(fd)
    smooth = disc_fd != 0
    rat_lines = rational_lines_in_level(inst.f, inst.k) if smooth else None
    gd1 = inst.g.homogeneous_part(d - 1)
    rhs_top = MPoly({(1, 0): inst.a, (0, 1): -inst.b}, ("x", "y")) * gd1
    disc_rhs = binary_form_discriminant(rhs_top)
    grad_ok = None
    disc_grad = None
    if d == 4:
        gf = gradient_form(inst)
        disc_grad = binary_form_discriminant(gf.to_int() if gf.is_integral() else gf) if gf.total_degree >= 1 else 0
        grad_ok = disc_grad != 0
    return HypothesisReport(
        no_rational_line=bool(smooth and not rat_lines),
        top_form_smooth=smooth,
        rhs_top_squarefree=disc_rhs != 0,
        gradient_squarefree=grad_ok,
        details={"disc_f_d": disc_fd, "disc_rhs_top": disc_rhs, "disc_gradient": disc_grad, "rational_lines": rat_lines},
    )


def family_census_value(inst: GeneralInstance, family: str, v: int) -> int:
    """Census polynomial of the family evaluated at one parameter value.

    For K this is Res_u(C_f(u), Disc_z[T_h(z) - (2ab)^(d-1) (u - k)]); for P it
    is Disc_x[P_h(x, x, 1)]; for gamma, Res_u(C_f(u), Disc_t[G_n(t) + k - u])."""
    d = inst.d
    if family == "P":
        T = _shift_family(inst)
        Pt = ParamPoly.from_mpoly(T, "t", "h")
        deriv = IntPoly1([c(v) * i for i, c in enumerate(Pt.coeffs)][1:], "t")
        return int(discriminant(deriv)) if deriv.degree >= 1 else 1
    P, _ = _param_family(inst, family)
    C = critical_value_poly(inst.f)
    if C.degree < 1:
        return 1
    scale = (2 * inst.a * inst.b) ** (d - 1) if family == "K" else 1
    cs = [c(v) for c in P.coeffs]
    shifted = [IntPoly1([cs[0] + scale * inst.k, -scale], "u")] + [IntPoly1([c], "u") for c in cs[1:]]
    Du = disc_in_param(ParamPoly(shifted, "t", "u"))
    return int(resultant(C.with_var("u"), Du))
