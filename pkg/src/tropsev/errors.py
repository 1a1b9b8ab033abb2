"""Exception hierarchy for tropsev."""

from typing import Any, Sequence, Tuple


class TropSevError(ValueError):
    """Base class for domain errors raised by tropsev."""


class DynamicSplit(TropSevError):
    """A zero divisor was met while computing in a dynamic quotient ring.

    The ring modulus factors as the product of the two coprime moduli carried
    by this exception. Callers restart the computation in each branch.
    """

    def __init__(self, factors: Tuple[Sequence[Any], Sequence[Any]]) -> None:
        self.factors = (tuple(factors[0]), tuple(factors[1]))
        degrees = ", ".join(str(len(f) - 1) for f in self.factors)
        super().__init__(f"Dynamic ring splits into factors of degree {degrees}")


class ZeroUpToTruncation(TropSevError):
    """A valuation was requested from a series known only to be O(t^trunc)."""


class PrecisionExhausted(TropSevError):
    """A valuation stayed ambiguous after every allowed precision increase."""


class NonGenericWeight(TropSevError):
    """The weight vector fails an interior or genericity precondition."""


class ExceptionalTranslation(TropSevError):
    """The marked cell is a pure translation of an exceptional configuration."""


class BudgetExceeded(TropSevError):
    """A combinatorial enumeration was requested beyond its supported size."""


class InvariantViolation(AssertionError):
    """An algebraic identity that must hold failed at runtime."""
