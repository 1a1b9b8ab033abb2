"""Truncation-order policy shared by every valuation-certifying computation."""

import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, TypeVar, Union

from ..errors import PrecisionExhausted, ZeroUpToTruncation

logger = logging.getLogger(__name__)

MAX_TRUNC_ENV = "TROPSEV_MAX_TRUNC"

T = TypeVar("T")


@dataclass(frozen=True)
class PrecisionPolicy:
    """How far truncation orders may grow when a valuation is ambiguous.

    Attributes:
        max_doublings: Number of times the initial order may be doubled
        max_trunc: Optional hard cap on any truncation order
        min_trunc: Optional floor for the first truncation order
    """

    max_doublings: int = 3
    max_trunc: Optional[Fraction] = None
    min_trunc: Optional[Fraction] = None

    @classmethod
    def from_env(cls) -> "PrecisionPolicy":
        """Build the default policy, honouring ``TROPSEV_MAX_TRUNC``.

        Raises:
            ValueError: If the environment variable is not a positive rational
        """
        raw = os.environ.get(MAX_TRUNC_ENV)
        if not raw:
            return cls()
        return cls(max_trunc=parse_cap(raw))

    def schedule(self, initial: Union[int, Fraction]) -> List[Fraction]:
        """Return the truncation orders to try, in order."""
        orders: List[Fraction] = []
        trunc = Fraction(initial)
        if self.min_trunc is not None:
            trunc = max(trunc, self.min_trunc)
        for _ in range(self.max_doublings + 1):
            if self.max_trunc is not None and trunc >= self.max_trunc:
                orders.append(self.max_trunc)
                break
            orders.append(trunc)
            trunc *= 2
        return orders


def parse_cap(raw: str) -> Fraction:
    try:
        cap = Fraction(raw.strip())
    except ValueError as e:
        raise ValueError(f"Invalid truncation cap {raw!r}") from e
    if cap <= 0:
        raise ValueError(f"Truncation cap must be positive, got {raw!r}")
    return cap


def initial_trunc(largest_exponent: Union[int, Fraction]) -> Fraction:
    """Default starting order: 4 * (largest exponent entering) + 1."""
    return 4 * max(Fraction(largest_exponent), Fraction(0)) + 1


def with_precision(
    attempt: Callable[[Fraction], T],
    initial: Union[int, Fraction],
    policy: Optional[PrecisionPolicy] = None,
    what: str = "computation",
) -> T:
    """Run ``attempt(trunc)`` with growing truncation orders.

    Args:
        attempt: Computation that raises ZeroUpToTruncation when its
            truncation order is too small to certify a valuation
        initial: First truncation order
        policy: Growth policy (environment default when omitted)
        what: Label used in log and error messages

    Returns:
        Result of the first successful attempt

    Raises:
        PrecisionExhausted: If every order in the schedule stays ambiguous
    """
    policy = policy or PrecisionPolicy.from_env()
    last: Optional[ZeroUpToTruncation] = None
    for trunc in policy.schedule(initial):
        try:
            return attempt(trunc)
        except ZeroUpToTruncation as e:
            logger.debug("%s ambiguous at O(t^%s): %s", what, trunc, e)
            last = e
    raise PrecisionExhausted(f"{what} still ambiguous after precision retries: {last}")
