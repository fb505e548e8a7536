import random

import pytest
import sympy

from energykit.energy import GeneralInstance
from energykit.polyarith import IntPoly1, MPoly, parse_poly, parse_univariate

X, Y, T, N = sympy.symbols("x y t n")


def to_sympy(p):
    """Convert an IntPoly1/RatPoly1/MPoly into a sympy expression."""
    if isinstance(p, MPoly):
        syms = sympy.symbols(p.vars)
        return sum(sympy.Rational(c) * sympy.Mul(*[s**e for s, e in zip(syms, exps)]) for exps, c in p.terms.items())
    s = sympy.Symbol(p.var)
    return sum(sympy.Rational(c) * s**i for i, c in enumerate(p.coeffs))


def random_intpoly(rng: random.Random, d: int, bound: int = 9, var: str = "x") -> IntPoly1:
    cs = [rng.randint(-bound, bound) for _ in range(d)]
    lead = 0
    while lead == 0:
        lead = rng.randint(-bound, bound)
    return IntPoly1(cs + [lead], var)


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture(scope="session")
def quartic():
    """f = x^4 - y^4 with its difference-quotient cofactor, k = 1."""
    return GeneralInstance.from_energy(parse_univariate("x^4"), 1, 1)


@pytest.fixture(scope="session")
def generic_cubic():
    f = parse_poly("x^3 + 2*x*y^2 - y^3 + x")
    g = parse_poly("x^2 + 3*x*y + y^2 + y")
    return GeneralInstance(f, g, 1, 2, 3, 40)


def pytest_terminal_summary(terminalreporter):
    results = getattr(__import__("sys").modules.get("test_acceptance"), "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
