import cmath
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from energykit.energy import GeneralInstance
from energykit.ffield import vp_table
from energykit.polyarith import integer_roots, parse_univariate
from energykit.sieve import (
    SieveContext,
    admissible_primes,
    balance_exponents,
    balance_identity,
    c_table,
    exclusion_product,
    exponent_calculator,
    gamma_sum,
    lhs_count,
    main_term_weight,
    s_ij_completed,
    s_ij_direct,
    sieve_bound,
)

GOLDEN = json.loads((Path(__file__).parent / "data" / "c_table_golden.json").read_text())


class TestCoefficients:
    def test_examples(self):
        assert c_table(1, 3)[0][0] == 4
        assert c_table(2, 3)[1][1] == 16
        assert all(c_table(a, d)[2][2] == 1 for a in range(1, 6) for d in range(2, 7))

    @pytest.mark.parametrize("row", GOLDEN, ids=lambda r: f"alpha{r['alpha']}-d{r['d']}")
    def test_golden(self, row):
        assert c_table(row["alpha"], row["d"]) == row["table"]

    def test_symmetric(self):
        for a in range(1, 6):
            t = c_table(a, 4)
            assert all(t[i][j] == t[j][i] for i in range(3) for j in range(3))

    def test_alpha_precondition(self):
        with pytest.raises(ValueError):
            c_table(0, 3)

    def test_main_term_weight(self):
        # with moments (1, 1, 2) the weighted sum is (alpha - 1)^2 - 8 d
        for a in range(1, 6):
            for d in range(2, 7):
                assert main_term_weight(a, d) == (a - 1) ** 2 - 8 * d


class TestGamma:
    def test_zero_frequency(self):
        assert gamma_sum(37, 0, 105) == 37
        assert gamma_sum(37, 210, 105) == 37

    def test_closed_form(self):
        for L in (15, 42):
            for m in range(-L // 2, L // 2 + 1):
                direct = sum(cmath.exp(-2j * math.pi * m * l / L) for l in range(1, 31))
                assert abs(gamma_sum(30, m, L) - direct) < 1e-9

    def test_envelope(self):
        L = 3 * 5 * 2
        for m in range(1, L // 2 + 1):
            assert abs(gamma_sum(40, m, L)) <= min(40, L / (2 * m) * math.pi) + 1e-9


@pytest.fixture(scope="module")
def quartic40():
    return GeneralInstance.from_energy(parse_univariate("x^4"), 1, 40)


class TestSums:
    def test_zero_moment_counts_set(self, generic_cubic):
        ctx = SieveContext.build(generic_cubic, 3, Q=10, primes=[5, 7])
        xs, ys = ctx.congruence_set()
        assert s_ij_direct(ctx, 0, 0, 5, 7) == len(xs)
        brute = sum(1 for x in range(1, 41) for y in range(1, 41)
                    if (4 ** 2 * (generic_cubic.f(x, y) - 3)) % 3 == 0)
        assert len(xs) == brute

    def test_empty_set(self):
        # x^4 - y^4 takes only 0, 1, 4 mod 5, so 8 (f - 2) never vanishes mod 5
        inst = GeneralInstance.from_energy(parse_univariate("x^4"), 2, 20)
        ctx = SieveContext.build(inst, 5, Q=10, primes=[3, 7])
        assert len(ctx.congruence_set()[0]) == 0
        for i in range(3):
            for j in range(3):
                assert s_ij_direct(ctx, i, j, 3, 7) == 0
                assert abs(s_ij_completed(ctx, i, j, 3, 7)) < 1e-6

    def test_direct_matches_pointwise(self, generic_cubic):
        ctx = SieveContext.build(generic_cubic, 2, Q=10, primes=[3, 5])
        Vp, Vq = vp_table(ctx.surface, 3), vp_table(ctx.surface, 5)
        xs, ys = ctx.congruence_set()
        expected = sum(int(Vp[x % 3, y % 3]) ** 2 * int(Vq[x % 5, y % 5]) for x, y in zip(xs, ys))
        assert s_ij_direct(ctx, 2, 1, 3, 5) == expected

    def test_two_paths(self, generic_cubic, quartic40):
        for inst in (generic_cubic, quartic40):
            for h in (1, 2, -5, 6):
                ctx = SieveContext.build(inst, h, Q=10, primes=[3, 5, 7])
                for p in (3, 5, 7):
                    for q in (3, 5, 7):
                        if math.gcd(p * q, h) != 1:
                            continue
                        L = p * q * abs(h)
                        for i in range(3):
                            for j in range(3):
                                direct = s_ij_direct(ctx, i, j, p, q)
                                completed = s_ij_completed(ctx, i, j, p, q)
                                assert abs(direct - completed) <= 1e-6 * L * inst.B

    def test_factored_equals_direct_psi(self, generic_cubic):
        ctx = SieveContext.build(generic_cubic.with_B(30), 2, Q=10, primes=[3, 5])
        for i, j in ((0, 1), (2, 2)):
            a = s_ij_completed(ctx, i, j, 3, 5, factored=True)
            b = s_ij_completed(ctx, i, j, 3, 5, factored=False)
            assert abs(a - b) < 1e-6 * 30 * 30
            assert abs(a - s_ij_direct(ctx, i, j, 3, 5)) < 1e-6 * 30 * 30

    def test_gcd_violation(self, generic_cubic):
        ctx = SieveContext.build(generic_cubic, 6, Q=10, primes=[5])
        with pytest.raises(ValueError):
            s_ij_completed(ctx, 0, 0, 3, 5)

    def test_context_validation(self, generic_cubic):
        with pytest.raises(ValueError):
            SieveContext(generic_cubic, 0, 10, (5,), 1)
        with pytest.raises(ValueError):
            SieveContext(generic_cubic, 1, 10, (5,), 0)


class TestExclusion:
    def test_admissible_primes_avoid_product(self, quartic):
        for h in (1, 2, 3, 7):
            prod = exclusion_product(quartic, h)
            assert prod != 0
            primes = admissible_primes(quartic, h, 60)
            assert primes and all(prod % p for p in primes)
            assert all(p > 3 for p in primes)

    def test_product_contains_h(self, generic_cubic):
        assert exclusion_product(generic_cubic, 11) % 11 == 0


@pytest.fixture(scope="module")
def report():
    inst = GeneralInstance.from_energy(parse_univariate("x^4"), 1, 60)
    return sieve_bound(SieveContext.build(inst, 1, Q=40))


class TestSieveBound:
    def test_lhs_matches_root_search(self, quartic):
        inst = quartic.with_B(25)
        ctx = SieveContext.build(inst, 3, Q=20)
        xs, ys = ctx.congruence_set()
        expected = 0
        for x, y in zip(xs.tolist(), ys.tolist()):
            F = ctx.surface.detection_poly(x, y)
            roots = [r for r in range(-10**4, 10**4) if F(r) == 0] if F.degree >= 1 else [0]
            expected += bool(roots)
            assert bool(roots) == bool(integer_roots(F))
        assert lhs_count(ctx) == expected

    def test_sieve_inequality(self, report):
        assert report.lhs >= 0
        assert report.lhs <= 50 * report.rhs

    def test_main_term_coefficient(self, report):
        # measured coefficient tracks (alpha - 1)^2 - 8 (d - 1) up to O(1/min(p, q))
        expected = main_term_weight(1, 3)
        assert abs(report.main_coefficient - expected) <= 8

    def test_main_term_alpha_dependence(self):
        inst = GeneralInstance.from_energy(parse_univariate("x^4"), 1, 40)
        coeffs = {a: sieve_bound(SieveContext.build(inst, 1, Q=30, alpha=a)).main_coefficient for a in (1, 4)}
        # the alpha dependence is exactly (alpha - 1)^2 in the weighted main term
        assert coeffs[4] - coeffs[1] == pytest.approx(9, abs=1.5)

    def test_report_json(self, report):
        rec = report.to_json()
        assert {"h", "Q", "alpha", "lhs", "rhs", "ratio"} <= set(rec)


class TestExponents:
    def test_small_degrees(self):
        s = exponent_calculator(3)
        assert s.regime == "sieve" and s.sieve_exponent == Fraction(17, 9)
        assert s.target == Fraction(299, 150) and s.below_target
        assert exponent_calculator(4).below_target

    def test_degree_five(self):
        s = exponent_calculator(5)
        assert float(s.refined) == pytest.approx(1.99536, abs=1e-5)
        assert s.refined < s.target.numerator / s.target.denominator
        assert float(s.target) == 1.996

    def test_all_degrees(self):
        assert all(exponent_calculator(d).below_target for d in range(3, 10001))

    def test_balance(self):
        for d in range(3, 50):
            a, b = balance_exponents(d)
            assert a == b == 2 - Fraction(1, 3 * d)
            assert balance_identity(d)

    def test_precondition(self):
        with pytest.raises(ValueError):
            exponent_calculator(2)
