"""Exact arithmetic: integer polynomials, cyclotomic and dynamic quotient rings.

Integer polynomials are sympy ``Poly`` objects over ``ZZ`` in the symbol ``x``.
Residue-field elements live in ``Q[y]/(m)`` for a squarefree monic ``m`` and
are stored as dense coefficient tuples (highest degree first), reduced
modulo ``m``, so that sympy's dense univariate routines can work on them
directly.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple, TypeVar, Union

from sympy import QQ, ZZ, Add, Poly, Symbol, cyclotomic_poly
from sympy.polys.densearith import (
    dup_add,
    dup_mul,
    dup_mul_ground,
    dup_neg,
    dup_quo,
    dup_rem,
    dup_sub,
)
from sympy.polys.densetools import dup_diff, dup_monic
from sympy.polys.euclidtools import dup_gcd, dup_gcdex

from ..errors import DynamicSplit

logger = logging.getLogger(__name__)

X = Symbol("x")
Y = Symbol("y")

Dense = Tuple[Any, ...]
T = TypeVar("T")


def to_qq(value: Any) -> Any:
    """Convert an int, Fraction or sympy rational into a ``QQ`` element."""
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    if QQ.of_type(value):
        return value
    return QQ.convert(value)


def to_fraction(value: Any) -> Fraction:
    """Convert a ``QQ`` element (or sympy rational) into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    value = to_qq(value)
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def _strip(coefficients: Sequence[Any]) -> Dense:
    index = 0
    while index < len(coefficients) and not coefficients[index]:
        index += 1
    return tuple(coefficients[index:])


# ---------------------------------------------------------------------------
# Integer polynomials
# ---------------------------------------------------------------------------


def int_poly(coefficients: Sequence[int]) -> Poly:
    """Build an integer polynomial from coefficients indexed by exponent.

    Args:
        coefficients: ``coefficients[k]`` is the coefficient of ``x^k``

    Returns:
        Polynomial over ZZ in ``x``
    """
    return Poly.from_list([int(c) for c in reversed(coefficients)], X, domain=ZZ)


def monomial_poly(exponent: int) -> Poly:
    """Return ``x^exponent`` as an integer polynomial."""
    return Poly.from_list([1] + [0] * exponent, X, domain=ZZ)


def ascending_coefficients(poly: Poly) -> List[int]:
    """Return the coefficients of ``poly`` indexed by exponent."""
    if poly.is_zero:
        return []
    return [int(c) for c in reversed(poly.all_coeffs())]


def order_at_zero(poly: Poly) -> int:
    """Return the largest ``k`` such that ``x^k`` divides a nonzero polynomial."""
    if poly.is_zero:
        raise ValueError("The zero polynomial has no order at zero")
    return min(monom[0] for monom in poly.monoms())


def cyclotomic(d: int) -> Poly:
    """Return the d-th cyclotomic polynomial.

    Args:
        d: Order, at least 1

    Returns:
        Monic irreducible polynomial over ZZ whose roots are the primitive
        d-th roots of unity

    Raises:
        ValueError: If d is not positive
    """
    if d < 1:
        raise ValueError(f"Cyclotomic order must be positive, got {d}")
    return Poly(cyclotomic_poly(d, X), X, domain=ZZ)


def squarefree_part(poly: Poly) -> Poly:
    """Return ``p / gcd(p, p')`` made primitive with positive leading term.

    Raises:
        ValueError: If the polynomial is zero
    """
    if poly.is_zero:
        raise ValueError("Squarefree part of the zero polynomial is undefined")
    return poly.sqf_part()


def strip_factor(poly: Poly, factor: Poly) -> Tuple[Poly, int]:
    """Divide out ``factor`` as often as it divides ``poly`` exactly.

    Returns:
        Tuple of (cofactor, number of divisions)
    """
    count = 0
    while poly.degree() >= factor.degree():
        quotient, remainder = poly.div(factor)
        if not remainder.is_zero:
            break
        poly = quotient
        count += 1
    return poly, count


# ---------------------------------------------------------------------------
# Quotient rings Q[y]/(m)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoeffRing:
    """The ring ``Q[y]/(modulus)`` with a squarefree monic modulus.

    ``kind`` is ``"rational"`` (modulus ``y``, so the ring is Q itself),
    ``"cyclotomic"`` (modulus the cyclotomic polynomial of ``order``) or
    ``"dynamic"`` (any squarefree modulus, split lazily on zero divisors).
    """

    modulus: Dense
    kind: str = "dynamic"
    order: Optional[int] = None

    @classmethod
    def rationals(cls) -> "CoeffRing":
        return cls((QQ.one, QQ.zero), "rational")

    @classmethod
    def cyclotomic(cls, d: int) -> "CoeffRing":
        """Return ``Q[y]/(Phi_d)``, whose generator is a primitive d-th root of 1."""
        phi = cyclotomic(d)
        modulus = tuple(QQ.from_sympy(c) for c in phi.all_coeffs())
        return cls(modulus, "cyclotomic", d)

    @classmethod
    def dynamic(cls, modulus: Union[Poly, Sequence[Any]]) -> "CoeffRing":
        """Return ``Q[y]/(m)`` for a squarefree polynomial ``m`` of degree >= 1.

        Args:
            modulus: sympy Poly or dense coefficients (highest degree first)

        Raises:
            ValueError: If the modulus is constant or not squarefree
        """
        if isinstance(modulus, Poly):
            dense = [QQ.from_sympy(c) for c in modulus.all_coeffs()]
        else:
            dense = [to_qq(c) for c in modulus]
        dense = list(dup_monic(list(_strip(dense)), QQ))
        if len(dense) < 2:
            raise ValueError("Ring modulus must have positive degree")
        derivative = dup_diff(dense, 1, QQ)
        if len(dup_gcd(dense, derivative, QQ)) != 1:
            raise ValueError("Ring modulus must be squarefree")
        return cls(tuple(dense), "dynamic")

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def is_field(self) -> bool:
        """True when the modulus is known to be irreducible."""
        return self.kind != "dynamic" or self.degree == 1

    def element(self, value: Any) -> "RingElem":
        """Coerce an int, Fraction, RingElem or dense tuple into this ring."""
        if isinstance(value, RingElem):
            if value.ring != self:
                raise ValueError("Ring element belongs to a different ring")
            return value
        if isinstance(value, (tuple, list)):
            return self._reduce([to_qq(c) for c in value])
        return self._reduce([to_qq(value)])

    def zero(self) -> "RingElem":
        return RingElem(self, ())

    def one(self) -> "RingElem":
        return self._reduce([QQ.one])

    def gen(self) -> "RingElem":
        """Return the class of ``y``."""
        return self._reduce([QQ.one, QQ.zero])

    def modulus_poly(self) -> Poly:
        return Poly.from_list([QQ.to_sympy(c) for c in self.modulus], Y, domain=QQ)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "order": self.order,
            "modulus": str(self.modulus_poly().as_expr()),
        }

    def _reduce(self, dense: Sequence[Any]) -> "RingElem":
        dense = list(_strip(dense))
        if len(dense) > self.degree:
            dense = dup_rem(dense, list(self.modulus), QQ)
        return RingElem(self, tuple(dense))

    def __repr__(self) -> str:
        if self.kind == "rational":
            return "CoeffRing(Q)"
        if self.kind == "cyclotomic":
            return f"CoeffRing(cyclotomic {self.order})"
        return f"CoeffRing(Q[y]/({self.modulus_poly().as_expr()}))"


@dataclass(frozen=True)
class RingElem:
    """Element of a CoeffRing, stored as its reduced representative."""

    ring: CoeffRing
    rep: Dense

    def _coerce(self, other: Any) -> "RingElem":
        return self.ring.element(other)

    def __add__(self, other: Any) -> "RingElem":
        other = self._coerce(other)
        return RingElem(self.ring, tuple(dup_add(list(self.rep), list(other.rep), QQ)))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RingElem":
        other = self._coerce(other)
        return RingElem(self.ring, tuple(dup_sub(list(self.rep), list(other.rep), QQ)))

    def __rsub__(self, other: Any) -> "RingElem":
        return self._coerce(other) - self

    def __neg__(self) -> "RingElem":
        return RingElem(self.ring, tuple(dup_neg(list(self.rep), QQ)))

    def __mul__(self, other: Any) -> "RingElem":
        if isinstance(other, (int, Fraction)):
            product = dup_mul_ground(list(self.rep), to_qq(other), QQ)
            return RingElem(self.ring, tuple(_strip(product)))
        other = self._coerce(other)
        return self.ring._reduce(dup_mul(list(self.rep), list(other.rep), QQ))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RingElem":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = self.ring.one()
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __truediv__(self, other: Any) -> "RingElem":
        return self * self._coerce(other).inverse()

    def is_zero(self) -> bool:
        return not self.rep

    def is_invertible(self) -> bool:
        """Decide whether this element is a unit.

        Returns:
            False for zero, True for units

        Raises:
            DynamicSplit: If the element is a nonzero zero divisor
        """
        if not self.rep:
            return False
        if self.ring.is_field:
            return True
        modulus = list(self.ring.modulus)
        common = dup_monic(dup_gcd(list(self.rep), modulus, QQ), QQ)
        if len(common) == 1:
            return True
        raise DynamicSplit((common, dup_quo(modulus, common, QQ)))

    def inverse(self) -> "RingElem":
        """Return the multiplicative inverse.

        Raises:
            ZeroDivisionError: If the element is zero
            DynamicSplit: If the element is a zero divisor of a dynamic ring
        """
        if not self.rep:
            raise ZeroDivisionError("Zero has no inverse")
        modulus = list(self.ring.modulus)
        s, _, h = dup_gcdex(list(self.rep), modulus, QQ)
        if len(h) != 1:
            raise DynamicSplit((h, dup_quo(modulus, h, QQ)))
        return self.ring._reduce(s)

    def is_rational(self) -> bool:
        return len(self.rep) <= 1

    def to_fraction(self) -> Fraction:
        """Return the value of a constant representative as a Fraction."""
        if not self.rep:
            return Fraction(0)
        if len(self.rep) > 1:
            raise ValueError(f"{self} is not a rational constant")
        return to_fraction(self.rep[0])

    def to_expr(self):
        degree = len(self.rep) - 1
        return Add(*[QQ.to_sympy(c) * Y ** (degree - k) for k, c in enumerate(self.rep)])

    def __str__(self) -> str:
        return str(self.to_expr())

    def __repr__(self) -> str:
        return f"RingElem({self})"


def eval_at(poly: Poly, value: RingElem) -> RingElem:
    """Evaluate an integer polynomial at a ring element by Horner's rule."""
    result = value.ring.zero()
    for coefficient in poly.all_coeffs():
        result = result * value + int(coefficient)
    return result


def root_multiplicity(poly: Poly, value: RingElem) -> int:
    """Return the multiplicity of ``value`` as a root of a nonzero polynomial.

    Raises:
        ValueError: If the polynomial is zero
        DynamicSplit: If a derivative value is a zero divisor
    """
    if poly.is_zero:
        raise ValueError("Every element is a root of the zero polynomial")
    multiplicity = 0
    while not eval_at(poly, value).is_invertible():
        multiplicity += 1
        poly = poly.diff(X)
    return multiplicity


def explore_branches(
    modulus: Union[Poly, Sequence[Any]],
    attempt: Callable[[CoeffRing], T],
    accept: Callable[[Exception], bool] = lambda e: False,
) -> T:
    """Run ``attempt`` in ``Q[y]/(modulus)``, splitting on zero divisors.

    Branches are explored in order of increasing modulus degree. A branch
    whose attempt raises an exception accepted by ``accept`` is abandoned and
    the next one is tried.

    Args:
        modulus: Squarefree modulus of the starting ring
        attempt: Computation to run in a ring
        accept: Predicate for per-branch failures that should not abort

    Returns:
        Result of the first branch that succeeds

    Raises:
        The last accepted failure when every branch fails.
    """
    pending = [CoeffRing.dynamic(modulus)]
    last_error: Optional[Exception] = None
    while pending:
        pending.sort(key=lambda ring: ring.degree)
        ring = pending.pop(0)
        try:
            return attempt(ring)
        except DynamicSplit as split:
            logger.debug(
                "Splitting %r into degrees %s",
                ring,
                [len(f) - 1 for f in split.factors],
            )
            pending.extend(CoeffRing.dynamic(factor) for factor in split.factors)
        except Exception as e:
            if not accept(e):
                raise
            logger.debug("Branch %r rejected: %s", ring, e)
            last_error = e
    if last_error is None:
        raise ValueError("No branch left to explore")
    raise last_error
