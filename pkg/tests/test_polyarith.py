import random
from fractions import Fraction

import pytest
import sympy
from sympy.polys.subresultants_qq_zz import sylvester
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import N, T, X, Y, random_intpoly, to_sympy
from energykit.errors import ParseError
from energykit.polyarith import (
    AlgebraicElem,
    IntPoly1,
    MPoly,
    ParamPoly,
    alg_eval,
    binary_form_discriminant,
    bareiss_det,
    cofactor_by_difference,
    content,
    disc_in_param,
    discriminant,
    format_poly,
    homogeneous_part,
    integer_roots,
    parse_poly,
    parse_univariate,
    resultant,
)


class TestParser:
    def test_univariate_coefficients(self):
        assert parse_univariate("x^3 - 2*x + 1").coeffs == (1, -2, 0, 1)

    def test_difference_of_squares(self):
        assert parse_poly("(x-y)*(x+y)") == parse_poly("x^2 - y^2")

    def test_quartic_cofactor(self):
        p = parse_univariate("x^4")
        f = parse_poly("x^4") - parse_poly("y^4")
        assert cofactor_by_difference(f) == parse_poly("x^3 + x^2*y + x*y^2 + y^3")
        assert f == MPoly({(4, 0): 1}, ("x", "y")) - MPoly({(0, 4): p.lc}, ("x", "y"))

    def test_unary_minus_binds_looser_than_power(self):
        assert parse_univariate("-x^2").coeffs == (0, 0, -1)

    @pytest.mark.parametrize("text,offset", [("x^^3", 2), ("2x", 1), ("x + z", 4), ("(x+1", 4)])
    def test_errors_carry_offsets(self, text, offset):
        with pytest.raises(ParseError) as info:
            parse_poly(text)
        assert info.value.offset == offset

    def test_exponent_overflow(self):
        with pytest.raises(ParseError):
            parse_poly("x^100000")

    @settings(max_examples=60, deadline=None)
    @given(st.dictionaries(st.tuples(st.integers(0, 5), st.integers(0, 5)), st.integers(-50, 50), max_size=8))
    def test_round_trip(self, terms):
        f = MPoly(terms, ("x", "y"))
        assert parse_poly(format_poly(f)) == f


class TestHomogeneous:
    def test_parts(self):
        f = parse_poly("x^3 - y^3 + x")
        assert homogeneous_part(f, 3) == parse_poly("x^3 - y^3")
        assert homogeneous_part(f, 2).is_zero()
        g = parse_poly("x^4 - y^4")
        assert homogeneous_part(g, 4) == g

    @settings(max_examples=40, deadline=None)
    @given(st.dictionaries(st.tuples(st.integers(0, 6), st.integers(0, 6)), st.integers(-20, 20), max_size=10))
    def test_parts_sum_to_whole(self, terms):
        f = MPoly(terms, ("x", "y"))
        parts = [f.homogeneous_part(i) for i in range(13)]
        assert all(p.is_zero() or p.is_homogeneous() for p in parts)
        total = MPoly({}, ("x", "y"))
        for p in parts:
            total = total + p
        assert total == f


class TestContent:
    def test_examples(self):
        assert content(parse_poly("4*x^2 + 6*x")) == 2
        assert content(parse_poly("x - y")) == 1
        assert content(parse_poly("9*x^3*y - 6*y^2")) == 3

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            content(MPoly({}, ("x", "y")))


class TestDiscriminant:
    def test_quadratics(self):
        assert discriminant(parse_univariate("x^2 - 1")) == 4
        assert discriminant(parse_univariate("x^2")) == 0

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            discriminant(IntPoly1([]))

    def test_matches_sympy(self, rng):
        for _ in range(40):
            f = random_intpoly(rng, rng.randint(1, 6))
            assert discriminant(f) == sympy.discriminant(to_sympy(f), X)

    def test_resultant_matches_sympy(self, rng):
        for _ in range(30):
            f = random_intpoly(rng, rng.randint(1, 5))
            g = random_intpoly(rng, rng.randint(1, 5))
            # sympy.resultant can flip sign for negative leading coefficients; use its Sylvester determinant
            assert resultant(f, g) == sylvester(to_sympy(f), to_sympy(g), X).det()

    def test_root_product_formula(self, rng):
        for _ in range(20):
            roots = [rng.randint(-6, 6) for _ in range(rng.randint(2, 5))]
            lead = rng.choice([1, -2, 3])
            f = IntPoly1.from_roots(roots, lead)
            d = len(roots)
            prod = 1
            for i in range(d):
                for j in range(i + 1, d):
                    prod *= (roots[i] - roots[j]) ** 2
            assert discriminant(f) == lead ** (2 * d - 2) * prod

    def test_transformation_law(self, rng):
        for _ in range(100):
            d = rng.randint(1, 6)
            f = random_intpoly(rng, d, 5)
            a = rng.choice([v for v in range(-4, 5) if v])
            b = rng.choice([v for v in range(-4, 5) if v])
            c = rng.randint(-4, 4)
            g = f.compose(IntPoly1([c, b])) * a
            assert discriminant(g) == a ** (2 * d - 2) * b ** (d * (d - 1)) * discriminant(f)

    def test_linear_shear_of_binary_form(self, rng):
        # Disc_x[f_d(N x, 1 - M x)] = N^(d(d-1)) Disc_x[f_d(x, 1)] when the degree is preserved
        checked = 0
        while checked < 30:
            d = rng.randint(2, 5)
            fd = MPoly({(i, d - i): rng.randint(-5, 5) for i in range(d + 1)}, ("x", "y"))
            if fd.coefficient((d, 0)) == 0 or binary_form_discriminant(fd) == 0:
                continue
            M, Nv = rng.randint(-4, 4), rng.choice([v for v in range(-4, 5) if v])
            if fd(Nv, -M) == 0:
                continue
            expr = sympy.expand(to_sympy(fd).subs({X: Nv * X, Y: 1 - M * X}, simultaneous=True))
            lhs = sympy.discriminant(expr, X)
            assert lhs == Nv ** (d * (d - 1)) * binary_form_discriminant(fd)
            checked += 1

    def test_bareiss(self):
        m = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
        assert bareiss_det(m) == 4
        assert bareiss_det([[0, 1], [1, 0]]) == -1


class TestDiscInParam:
    def test_t_squared_minus_n(self):
        F = ParamPoly([IntPoly1([0, -1], "n"), IntPoly1([0], "n"), IntPoly1([1], "n")], "t", "n")
        assert to_sympy(disc_in_param(F)) == sympy.discriminant(T**2 - N, T)

    def test_param_free(self):
        F = ParamPoly([IntPoly1([-1], "n"), IntPoly1([0], "n"), IntPoly1([1], "n")], "t", "n")
        assert disc_in_param(F).coeffs == (4,)

    def test_random_against_sympy(self, rng):
        for _ in range(10):
            d = rng.randint(2, 4)
            coeffs = [IntPoly1([rng.randint(-3, 3) for _ in range(3)], "n") for _ in range(d)]
            coeffs.append(IntPoly1([rng.choice([1, 2, -1]), rng.randint(-2, 2)], "n"))
            F = ParamPoly(coeffs, "t", "n")
            expr = sum(to_sympy(c) * T**i for i, c in enumerate(coeffs))
            assert sympy.expand(to_sympy(disc_in_param(F)) - sympy.discriminant(expr, T)) == 0


class TestAlgebraic:
    def test_cyclotomic(self):
        alpha = AlgebraicElem.generator(parse_univariate("y^2 + y + 1", "y"))
        f = parse_poly("x^2 + x*y + y^2")
        assert alg_eval(f, AlgebraicElem(1, alpha.modulus), alpha).is_zero()

    def test_projection(self):
        alpha = AlgebraicElem.generator(IntPoly1([-2, 0, 1], "y"))
        one = AlgebraicElem(1, alpha.modulus)
        assert alg_eval(parse_poly("x"), one, alpha) == one

    def test_ring_morphism(self, rng):
        mod = IntPoly1([1, 0, 1, 1], "y")  # irreducible cubic
        alpha = AlgebraicElem.generator(mod)
        for _ in range(20):
            f = MPoly({(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-5, 5) for _ in range(4)}, ("x", "y"))
            g = MPoly({(rng.randint(0, 3), rng.randint(0, 3)): rng.randint(-5, 5) for _ in range(4)}, ("x", "y"))
            x = alpha * rng.randint(1, 3) + rng.randint(-3, 3)
            y = alpha * alpha + rng.randint(-2, 2)
            assert alg_eval(f + g, x, y) == alg_eval(f, x, y) + alg_eval(g, x, y)
            assert alg_eval(f * g, x, y) == alg_eval(f, x, y) * alg_eval(g, x, y)

    def test_beta_well_defined(self):
        # f_d(1, y) squarefree gives a nonzero derivative at every root
        fd = parse_poly("x^3 - 2*y^3 + x*y^2")
        mod = fd.specialize({"x": 1}).to_univariate("y")
        alpha = AlgebraicElem.generator(mod)
        one = AlgebraicElem(1, alpha.modulus)
        deriv = alg_eval(fd.partial("y"), one, alpha)
        beta = alg_eval(parse_poly("x^2 + y^2"), one, alpha) / deriv * -1
        assert beta * deriv == -alg_eval(parse_poly("x^2 + y^2"), one, alpha)


def test_integer_roots_against_sympy(rng):
    for _ in range(30):
        roots = [rng.randint(-30, 30) for _ in range(rng.randint(1, 4))]
        extra = random_intpoly(rng, rng.randint(0, 2), 3)
        f = IntPoly1.from_roots(roots) * extra
        expected = sorted({r for r in sympy.roots(to_sympy(f), X, filter="Z")})
        assert integer_roots(f) == expected
