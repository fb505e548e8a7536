import cmath
import itertools
import math

import numpy as np
import pytest
import sympy
from sympy.functions.combinatorial.numbers import stirling

from conftest import to_sympy
from energykit.energy import GeneralInstance
from energykit.errors import BudgetExceeded
from energykit.ffield import (
    ExtField,
    PrimeField,
    build_sieve_surface,
    count_roots_mod_p,
    is_irreducible_mod_p,
    is_prime,
    kahan_sum,
    local_count_vp,
    moment_statistic,
    phi_solutions,
    phi_sum,
    primes_up_to,
    psi_direct,
    psi_factored,
    roots_of_unity,
    shifted_g,
    sigma_split_constants,
    sigma_t,
    surface_cone_count,
    vp_table,
    weierstrass_point_count,
)
from energykit.polyarith import IntPoly1, MPoly, parse_poly, parse_univariate


def brute_sum(weights, M, N, n):
    return sum(weights[x][y] * cmath.exp(2j * math.pi * (M * x + N * y) / n)
               for x in range(n) for y in range(n) if weights[x][y])


class TestPrimes:
    def test_against_sympy(self):
        assert [n for n in range(2000) if is_prime(n)] == list(sympy.primerange(2000))
        assert primes_up_to(500) == list(sympy.primerange(501))
        for n in (2**61 - 1, 10**18 + 9, 10**18 + 7):
            assert is_prime(n) == sympy.isprime(n)


class TestFields:
    def test_prime_field(self):
        F = PrimeField(13)
        assert all(F.mul(a, F.inv(a)) == 1 for a in range(1, 13))
        with pytest.raises(ValueError):
            PrimeField(15)

    @pytest.mark.parametrize("p,j", [(2, 3), (3, 2), (5, 3), (7, 2), (2, 8)])
    def test_extension_field(self, p, j):
        F = ExtField(p, j)
        x = sympy.Symbol("x")
        modulus = sympy.Poly(list(reversed(F.modulus)), x, modulus=p)
        assert modulus.is_irreducible
        assert is_irreducible_mod_p(F.modulus, p)
        els = list(F.elements())
        assert len(els) == p**j
        for a in els[1:]:
            assert F.mul(a, F.inv(a)) == 1
            assert F.pow(a, F.q - 1) == 1
        for a, b, c in itertools.islice(itertools.product(els, repeat=3), 0, 4000, 7):
            assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
            assert F.sub(F.add(a, b), b) == a

    def test_lexicographic_modulus(self):
        # over F_2 the first irreducible quadratic is x^2 + x + 1
        assert ExtField(2, 2).modulus == [1, 1, 1]
        assert ExtField(3, 2).modulus == [1, 0, 1]

    def test_order_budget(self):
        with pytest.raises(BudgetExceeded):
            ExtField(2, 21)


class TestLocalCounts:
    def test_examples(self):
        assert local_count_vp(IntPoly1([1, 0, 1]), 5) == 2
        assert local_count_vp(IntPoly1([1, 0, 1]), 3) == 0
        assert local_count_vp(IntPoly1([0, 0, 1]), 7) == 1

    def test_degenerate(self):
        with pytest.raises(ValueError):
            local_count_vp(IntPoly1([7, 14]), 7)
        assert local_count_vp(IntPoly1([7, 14]), 7, allow_degenerate=True) == 7

    def test_gcd_path_large_prime(self, rng):
        p = 100_003
        for _ in range(5):
            roots = [rng.randrange(p) for _ in range(3)]
            f = IntPoly1.from_roots(roots) * IntPoly1([1, 0, 1])
            expected = len(set(roots)) + (2 if pow(p - 1, (p - 1) // 2, p) == 1 else 0)
            assert count_roots_mod_p(list(f.coeffs), p) == expected

    def test_scan_matches_sympy(self, rng):
        for _ in range(30):
            p = rng.choice([3, 5, 7, 11, 13, 101])
            f = IntPoly1([rng.randint(-20, 20) for _ in range(rng.randint(2, 6))] + [1])
            poly = sympy.Poly(to_sympy(f), sympy.Symbol("x"), modulus=p)
            expected = len({r for r, _ in poly.ground_roots().items()}) if poly.degree() > 0 else 0
            assert local_count_vp(f, p) == len([r for r in range(p) if f(r) % p == 0])
            assert local_count_vp(f, p) == len([r for r in range(p) if poly.eval(r) == 0])
            assert expected <= local_count_vp(f, p)

    def test_vp_table_matches_detection_poly(self, generic_cubic):
        for h in (1, -3, 5):
            surf = build_sieve_surface(generic_cubic, h)
            for p in (3, 5, 7, 11):
                V = vp_table(surf, p)
                for x in range(p):
                    for y in range(p):
                        F = surf.detection_poly(x, y)
                        assert V[x, y] == local_count_vp(F, p, allow_degenerate=True)


class TestSurface:
    def test_shift_polynomial_against_sympy(self, generic_cubic):
        inst = generic_cubic
        z = sympy.Symbol("z")
        for h in (1, -2, 7):
            g = to_sympy(inst.g)
            x, y = sympy.symbols("x y")
            expr = (2 * inst.a * inst.b) ** (inst.d - 1) * h * g.subs(
                {x: (z + h) / (2 * inst.a), y: (z - h) / (2 * inst.b)}, simultaneous=True)
            assert sympy.expand(expr - to_sympy(shifted_g(inst, h))) == 0

    def test_forms(self, generic_cubic, quartic):
        for inst in (generic_cubic, quartic):
            d = inst.d
            scale = (2 * inst.a * inst.b) ** (d - 1)
            gba = inst.g.homogeneous_part(d - 1)(inst.b, inst.a)
            for h in (1, 2, -3):
                surf = build_sieve_surface(inst, h)
                top = MPoly({(i, j, 0): c * scale for (i, j), c in inst.f.homogeneous_part(d).terms.items()},
                            ("x", "y", "z"))
                assert surf.K.specialize({"w": 0}) == top
                assert surf.T.lc == h * gba
                assert surf.leading_coefficient() == -h * gba
                assert surf.detection_poly(3, 4).degree == d - 1
                Pa = surf.P.specialize({"w": 1})
                X = MPoly.var("x", ("x",))
                diag = Pa.substitute({"x": X, "y": X}, ("x",))
                assert diag.to_univariate("x") == surf.T.derivative().with_var("x")

    def test_cubic_coincidence(self, generic_cubic):
        inst = generic_cubic
        gba = inst.g.homogeneous_part(2)(inst.b, inst.a)
        for h in (1, -4):
            surf = build_sieve_surface(inst, h)
            P = surf.P
            assert P.specialize({"w": 0}) == MPoly({(1, 0): gba * h, (0, 1): gba * h}, ("x", "y"))
            assert P.homogeneous_part(1) == P
            x, y, z = sympy.symbols("x y z")
            Pa = to_sympy(P.specialize({"w": 1}))
            diff = sympy.factor(Pa - Pa.subs(y, z))
            assert sympy.simplify(diff / (y - z)) == gba * h

    def test_quartic_coincidence(self, quartic):
        x, y, z = sympy.symbols("x y z")
        for h in (1, 3, -2):
            surf = build_sieve_surface(quartic, h)
            Pa = to_sympy(surf.P.specialize({"w": 1}))
            quotient = sympy.cancel((Pa - Pa.subs(y, z)) / (y - z))
            lc, c2 = surf.T.lc, surf.T.coeff(2)
            assert sympy.expand(quotient - (lc * (x + y + z) + c2)) == 0


class TestSums:
    @pytest.fixture
    def surf(self, quartic):
        return build_sieve_surface(quartic, 1)

    def test_sigma_zero(self, surf):
        for p in (5, 7, 11):
            assert sigma_t(0, p, 0, 0, surf).exact_integer == p * p
            assert abs(sigma_t(0, p, 1, 3, surf).value) < 1e-9

    def test_sigma_against_brute(self, surf):
        for p in (5, 7):
            V = vp_table(surf, p).tolist()
            for t in range(5):
                Vt = [[v**t for v in row] for row in V]
                for M, N in ((0, 1), (2, 3), (4, 0)):
                    assert abs(sigma_t(t, p, M, N, surf).value - brute_sum(Vt, M, N, p)) < 1e-8

    def test_sigma_one_near_p_squared(self, surf):
        p = 101
        s1 = sigma_t(1, p, 0, 0, surf).exact_integer
        assert abs(s1 - p * p) <= 3 * p

    def test_moments_are_counts(self, surf):
        for p in (7, 13):
            V = vp_table(surf, p)
            for t in range(5):
                assert sigma_t(t, p, 0, 0, surf).exact_integer == int((V.astype(np.int64) ** t).sum())

    def test_parseval(self, surf):
        for p in (11, 31, 61):
            total = sum(abs(sigma_t(1, p, M, N, surf).value) ** 2 for M in range(p) for N in range(p))
            assert round(total / p**2) == sigma_t(2, p, 0, 0, surf).exact_integer
            assert abs(total / p**2 - sigma_t(2, p, 0, 0, surf).exact_integer) <= 1e-6 * p * p

    def test_conjugation(self, surf, quartic):
        for M, N in ((1, 2), (3, 5)):
            a, b = sigma_t(2, 13, M, N, surf).value, sigma_t(2, 13, -M, -N, surf).value
            assert abs(a - b.conjugate()) < 1e-9
            a, b = phi_sum(15, M, N, quartic).value, phi_sum(15, -M, -N, quartic).value
            assert abs(a - b.conjugate()) < 1e-9

    def test_phi_basics(self, quartic):
        assert phi_sum(1, 3, 4, quartic).value == 1
        for h in (6, 10):
            assert abs(phi_sum(h, 2, 3, quartic).value - phi_sum(h, 2 + h, 3 - 2 * h, quartic).value) < 1e-9
            assert phi_sum(h, 0, 0, quartic).exact_integer == int(phi_solutions(quartic, h).sum())

    def test_phi_multiplicativity(self, generic_cubic):
        inst = generic_cubic
        for j in range(1, 51, 7):
            for l in range(1, 51, 5):
                if math.gcd(j, l) != 1 or j * l > 400:
                    continue
                for M, N in ((1, 2), (5, 0)):
                    lhs = phi_sum(j * l, M, N, inst).value
                    lb = pow(l, -1, j) if j > 1 else 0
                    jb = pow(j, -1, l) if l > 1 else 0
                    rhs = phi_sum(j, lb * M, lb * N, inst).value * phi_sum(l, jb * M, jb * N, inst).value
                    assert abs(lhs - rhs) < 1e-8 * (j * l) ** 2

    def test_psi_factorisation(self, generic_cubic):
        inst = generic_cubic
        for h in (1, 2, -4, 9):
            surf = build_sieve_surface(inst, h)
            for p, q in ((3, 5), (5, 5), (7, 11), (11, 11)):
                if math.gcd(p * q, h) != 1:
                    continue
                L = p * q * abs(h)
                for i, j in ((0, 0), (1, 2), (2, 1)):
                    for m, n in ((0, 0), (1, 0), (p, 2 * p), (7, 13)):
                        direct = psi_direct(i, j, m, n, p, q, h, surf).value
                        assert abs(direct - psi_factored(i, j, m, n, p, q, h, surf)) <= 1e-6 * L * L
                if p == q:
                    assert abs(psi_direct(1, 1, 1, 0, p, q, h, surf).value) < 1e-6 * L * L

    def test_psi_zero_zero_counts_residues(self, generic_cubic):
        inst = generic_cubic
        surf = build_sieve_surface(inst, 5)
        p, q = 3, 7
        S = phi_solutions(inst, 5)
        count = sum(1 for r in range(105) for s in range(105) if S[r % 5, s % 5])
        assert psi_direct(0, 0, 0, 0, p, q, 5, surf).exact_integer == count == (p * q) ** 2 * int(S.sum())

    def test_gcd_violation(self, generic_cubic):
        surf = build_sieve_surface(generic_cubic, 6)
        with pytest.raises(ValueError):
            psi_direct(0, 0, 1, 1, 3, 5, 6, surf)

    def test_roots_and_kahan(self):
        z = roots_of_unity(12)
        assert abs(z[3] - 1j) < 1e-15
        assert abs(kahan_sum([0.1] * 10) - 1.0) < 1e-15


class TestCounts:
    def test_weierstrass(self):
        assert weierstrass_point_count(1, 1, 5) == (8, 9)
        for p in (5, 7, 11, 13):
            brute = sum(1 for x in range(p) for y in range(p) if (y * y - x**3 - x - 1) % p == 0)
            aff, proj = weierstrass_point_count(1, 1, p)
            assert aff == brute and proj == brute + 1

    def test_moment_identity_map(self):
        F = parse_poly("x", ("x",))
        for field in (PrimeField(7), ExtField(3, 2)):
            res = moment_statistic(field, F, expected=1)
            assert res.moment == 0 and all(v == 1 for v in res.counts.values())

    def test_moment_conic(self):
        # N(tau) = #{x^2 + y^2 = tau} over F_13 is 12 for tau != 0 and 25 at 0
        res = moment_statistic(PrimeField(13), parse_poly("x^2 + y^2"), expected=13)
        assert res.counts[0] == 25 and all(res.counts[t] == 12 for t in range(1, 13))
        assert res.moment == 12**2 + 12

    def test_surface_count(self, quartic):
        surf = build_sieve_surface(quartic, 1)
        ratios = []
        for p in (7, 11, 13, 17):
            n = surface_cone_count(surf, p)
            K = surf.K
            if p <= 11:
                brute = sum(1 for pt in itertools.product(range(p), repeat=4) if K(*pt) % p == 0)
                assert n == brute
            ratios.append(abs(n - p**3) / p**2)
        assert max(ratios) < 3

    def test_split_constants(self):
        for t in range(2, 6):
            assert sigma_split_constants(t) == (stirling(t, 2), stirling(t, 3))
        assert sigma_split_constants(3) == (3, 1)
        assert sigma_split_constants(4) == (7, 6)
