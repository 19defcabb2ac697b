"""
Exceptions raised by the exact ring, the derivations and the recursion engine.

Each class also derives from the closest built-in so callers that only know
about ``ValueError`` or ``ArithmeticError`` keep working.
"""

from typing import Optional


class KillingFieldError(Exception):
    """Base class for all engine failures."""


class MixedPrefactor(KillingFieldError, ValueError):
    """Monomials of a polynomial disagree on their residual power of h3^(1/3)."""


class StrayConjugate(MixedPrefactor):
    """An hbar3 factor cannot be paired into r^2 consistently with the rest of the polynomial."""


class ConjugateInput(KillingFieldError, ValueError):
    """An operator that only accepts unbarred functions received a polynomial containing hbar3."""


class TowerBoundExceeded(KillingFieldError, OverflowError):
    """A derivation would create h_j beyond the configured tower bound."""

    def __init__(self, index: int, bound: int):
        self.index = index
        self.bound = bound
        super().__init__(f"h_{index} exceeds the configured tower bound N={bound}")


class SingularSolve(KillingFieldError, ArithmeticError):
    """The 2x2 constraint system has a determinant that is not an invertible monomial."""


class NonMonomialDivisor(KillingFieldError, ArithmeticError):
    """Exact division was requested by something other than a monomial in gamma and h3^(1/3)."""


class CrossCheckMismatch(KillingFieldError, RuntimeError):
    """Two independent routes to the same coefficient produced different polynomials."""

    def __init__(self, coefficient: str, first: str, second: str, difference: Optional[object] = None):
        self.coefficient = coefficient
        self.routes = (first, second)
        self.difference = difference
        super().__init__(f"{coefficient}: route '{first}' disagrees with route '{second}' by {difference}")
