"""Exact toolkit for additive energy of integer polynomials and the finite
computations (exponential sums, discriminant censuses, line classification,
congruence root counts, polynomial sieve) used to bound it."""

__version__ = "0.1.0"

from .errors import BudgetExceeded, EnergyKitError, InvariantError, ParseError
from .fitting import FitResult, fit_exponent

__all__ = ["BudgetExceeded", "EnergyKitError", "InvariantError", "ParseError", "FitResult", "fit_exponent"]
