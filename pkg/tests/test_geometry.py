from fractions import Fraction

import pytest
import sympy
from sympy.polys.subresultants_qq_zz import sylvester

from conftest import to_sympy
from energykit.energy import GeneralInstance, curve_count_in_box
from energykit.errors import InvariantError
from energykit.fitting import fit_exponent
from energykit.geometry import (
    check_hypotheses,
    classify_level_lines,
    critical_value_poly,
    gamma_n_line_report,
    gamma_projective,
    gradient_form,
    rhs_level_counts,
    limit_form,
    lines_in_level,
    projective_singular_points_mod_p,
    rational_line_check,
    rational_lines_in_level,
    singular_census,
)
from energykit.polyarith import (
    IntPoly1,
    MPoly,
    alg_eval,
    binary_form_discriminant,
    discriminant,
    parse_poly,
    parse_univariate,
)


class TestRationalLineCheck:
    def test_cube_nonzero_level(self):
        assert not rational_line_check(parse_univariate("x^3"), 5).has_line

    def test_cube_zero_level(self):
        res = rational_line_check(parse_univariate("x^3"), 0)
        assert res.has_line and (Fraction(1), Fraction(0)) in res.rational_lines

    def test_cube_plus_square(self):
        res = rational_line_check(parse_univariate("x^3 + 3*x^2"), 0)
        assert res.rational_lines == [(Fraction(1), Fraction(0))]
        # the alpha != 1 candidates all fail the full identity
        t = sympy.Symbol("t")
        p = lambda v: v**3 + 3 * v**2
        for alpha in (sympy.Rational(-1, 2) + sympy.sqrt(3) * sympy.I / 2,):
            beta = 3 * (alpha - 1) / 3
            assert sympy.expand(p(t) - p(alpha * t + beta)) != 0

    def test_random_levels(self, rng):
        for _ in range(20):
            coeffs = [0] + [rng.randint(-4, 4) for _ in range(3)] + [rng.choice([1, -1, 2])]
            p = IntPoly1(coeffs)
            k = rng.choice([v for v in range(-30, 31) if v])
            assert not rational_line_check(p, k).has_line


class TestLevelLines:
    def test_quartic(self):
        f = parse_poly("x^4 - y^4")
        cands = classify_level_lines(f)
        assert all(c.kind == "slope" for c in cands)
        assert all(c.beta.is_zero() for c in cands)
        assert all((not c.genuine) or c.level.is_zero() for c in cands)
        assert rational_lines_in_level(f, 0) == [("slope", Fraction(-1), 0), ("slope", Fraction(1), 0)]
        assert lines_in_level(f, 1) == []

    def test_cube_shifted(self):
        cands = classify_level_lines(parse_poly("x^3 - y^3 + 1"))
        assert len(cands) == 1 and cands[0].genuine and cands[0].level == 1
        assert cands[0].beta.is_zero()

    def test_no_vertical_when_top_coefficient_present(self):
        cands = classify_level_lines(parse_poly("x^3 + 2*y^3 + x*y"))
        assert all(c.kind == "slope" for c in cands)

    def test_vertical_candidate(self):
        # f_d(0, 1) = 0 and the line x = 2 lies in the level f(2, 0)
        f = parse_poly("x^3 - 2*x^2 + x*y^2 - 2*y^2")  # (x - 2)(x^2 + y^2)
        kinds = {(c.kind, c.genuine) for c in classify_level_lines(f)}
        assert ("vertical", True) in kinds

    def test_rejects_singular_top(self):
        with pytest.raises(ValueError):
            classify_level_lines(parse_poly("x^2*y + x"))

    def test_identities_exact(self, rng):
        for _ in range(10):
            f = MPoly({(i, j): rng.randint(-3, 3) for i in range(4) for j in range(4 - i) if i + j}, ("x", "y"))
            fd = f.homogeneous_part(3)
            if fd.is_zero() or binary_form_discriminant(fd) == 0:
                continue
            for c in classify_level_lines(f):
                if c.kind == "slope":
                    one = c.alpha * 0 + 1
                    lhs = c.beta * alg_eval(fd.partial("y"), one, c.alpha)
                    assert lhs == -alg_eval(f.homogeneous_part(2), one, c.alpha)

    def test_completeness_against_brute_force(self, rng):
        vals = [Fraction(u, v) for u in range(-4, 5) for v in range(1, 5)]
        vals = sorted(set(vals))
        tested = 0
        while tested < 50:
            # half the trials plant a line y = s x + c in some level
            d = rng.choice([3, 4])
            q = MPoly({(i, j): rng.randint(-2, 2) for i in range(d) for j in range(d - i)}, ("x", "y"))
            if rng.random() < 0.5:
                s, c = rng.choice(vals), rng.choice(vals)
                lin = MPoly({(0, 1): s.denominator * c.denominator, (1, 0): -s.numerator * c.denominator,
                             (0, 0): -c.numerator * s.denominator}, ("x", "y"))
                f = lin * q
                f = f - MPoly.const(f.coefficient((0, 0)), f.vars)
            else:
                f = MPoly({(i, j): rng.randint(-3, 3) for i in range(d + 1) for j in range(d + 1 - i) if i + j},
                          ("x", "y"))
            fd = f.homogeneous_part(d)
            if f.total_degree != d or binary_form_discriminant(fd) == 0:
                continue
            tested += 1
            cands = classify_level_lines(f)
            # a line lies in a level iff f is constant at d + 1 points of it
            ts = [Fraction(v) for v in range(d + 1)]
            for s in vals:
                for c in vals:
                    values = {f(tv, s * tv + c) for tv in ts}
                    if len(values) == 1:
                        level = values.pop()
                        assert any(
                            cand.kind == "slope" and cand.genuine and cand.modulus(s) == 0
                            and cand.beta.value(s) == c and cand.level.value(s) == level
                            for cand in cands
                        ), (f, s, c)
            for g in vals:
                if len({f(g, tv) for tv in ts}) == 1:
                    assert any(cand.kind == "vertical" and cand.gamma == g and cand.genuine for cand in cands)


class TestGammaLines:
    def test_degree_five_growth(self):
        inst = GeneralInstance.from_energy(parse_univariate("x^5"), 31, 1)
        totals = {B: sum(gamma_n_line_report(inst, n, B).total_points for n in range(1, B + 1)) for B in (25, 50, 100)}
        assert totals[25] > 0
        fit = fit_exponent(totals.items())
        assert fit.slope <= 1.5 + 0.15
        rep = gamma_n_line_report(inst, 2, 30)
        assert rep.total_points == sum(ln.points for ln in rep.lines)
        assert all(ln.case in (1, 2) for ln in rep.lines)

    def test_rhs_level_counts(self):
        inst = GeneralInstance(parse_poly("x^3 + y^3 + x"), parse_poly("x^2 + x*y + y^2 + y"), 1, 2, 1, 1)
        Bs = [50, 100, 200, 400]
        counts = rhs_level_counts(inst, 12, Bs)
        F = inst.rhs_poly()
        assert counts[0] == sum(1 for x in range(1, 51) for y in range(1, 51) if F(x, y) == 12)
        if sum(c > 0 for c in counts) >= 2:
            assert fit_exponent(zip(Bs, counts)).slope <= 0.5 + 0.15


class TestCensus:
    def test_quartic_gamma(self, quartic):
        c = singular_census(quartic, "gamma", 50)
        n = sympy.Symbol("n")
        assert to_sympy(c.polynomial) == -256 * n**12 + 768 * n**8 - 768 * n**4 + 256
        assert c.roots == [1]
        assert c.leading_matches
        lf = limit_form(quartic, "gamma")
        assert c.predicted_leading_coefficient == discriminant(lf)

    def test_gamma_limit_matches_formula(self, quartic, generic_cubic):
        t = sympy.Symbol("t")
        for inst in (quartic, generic_cubic):
            d = inst.d
            gd1 = to_sympy(inst.g.homogeneous_part(d - 1)).subs({sympy.Symbol("x"): t, sympy.Symbol("y"): 1})
            expected = sympy.discriminant(sympy.expand((inst.a * t - inst.b) * gd1), t)
            c = singular_census(inst, "gamma", 20)
            assert c.leading_coefficient == c.predicted_leading_coefficient == expected

    def test_quartic_k_and_p(self, quartic):
        h = sympy.Symbol("h")
        k = singular_census(quartic, "K", 20)
        assert to_sympy(k.polynomial) == -1024 * h**10 - 27648 * h**2
        assert k.leading_matches and k.roots == []
        p = singular_census(quartic, "P", 20)
        assert to_sympy(p.polynomial) == -192 * h**4
        assert p.roots == []

    def test_gradient_form(self, quartic):
        assert gradient_form(quartic) == parse_poly("4*x^2 + 4*x*y + 4*y^2")
        assert binary_form_discriminant(gradient_form(quartic)) != 0

    def test_p_limit_is_gradient(self, quartic):
        # the P census leading coefficient is Disc of (2ab)^(d-1) g'_{d-1}((x+1)/2a, (x-1)/2b)
        c = singular_census(quartic, "P", 10)
        x = sympy.Symbol("x")
        X, Y = sympy.symbols("x y")
        g3 = to_sympy(quartic.g.homogeneous_part(3))
        grad = sympy.diff(g3, X) / 2 + sympy.diff(g3, Y) / 2
        form = sympy.expand(8 * grad.subs({X: (x + 1) / 2, Y: (x - 1) / 2}, simultaneous=True))
        assert c.leading_coefficient == sympy.discriminant(form, x)

    def test_cubic_p_family_empty(self, generic_cubic):
        c = singular_census(generic_cubic, "P", 30)
        assert c.roots == []

    def test_census_polynomial_against_sympy(self, generic_cubic):
        # spot-check Res_u(C_f, Disc_t[G_n(t) + k - u]) at a few n via sympy
        inst = generic_cubic
        c = singular_census(inst, "gamma", 10)
        t, u = sympy.symbols("t u")
        X, Y = sympy.symbols("x y")
        G = sympy.expand((inst.a * t - inst.b * sympy.Symbol("n")) * to_sympy(inst.g).subs({X: t, Y: sympy.Symbol("n")},
                                                                                            simultaneous=True))
        C = to_sympy(critical_value_poly(inst.f).with_var("u"))
        for nv in (2, 3, 5):
            D = sympy.discriminant(sympy.expand(G.subs(sympy.Symbol("n"), nv) + inst.k - u), t)
            R = sylvester(C, D, u).det()
            assert R == c.polynomial(nv)

    def test_census_soundness(self, quartic):
        c = singular_census(quartic, "gamma", 50)
        p = 53
        for n in range(1, 51):
            if n in c.roots or c.polynomial(n) % p == 0:
                continue
            assert projective_singular_points_mod_p(gamma_projective(quartic, n), p) == 0
        assert projective_singular_points_mod_p(gamma_projective(quartic, 1), p) > 0

    def test_hypotheses(self, quartic):
        rep = check_hypotheses(quartic)
        assert rep.all_hold
        other = GeneralInstance.from_energy(parse_univariate("x^4 + x^2"), 1, 1)
        assert check_hypotheses(other).top_form_smooth
        singular_top = GeneralInstance(parse_poly("x^2*y^2 + x"), parse_poly("x^3 + y"), 1, 1, 1, 1)
        assert not check_hypotheses(singular_top).top_form_smooth
