"""Truncated Puiseux series with coefficients in a CoeffRing."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Poly

from ..errors import ZeroUpToTruncation
from .arith import CoeffRing, RingElem

Number = Union[int, Fraction]
Term = Tuple[Fraction, RingElem]


def _as_fraction(value: Any) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


@dataclass(frozen=True)
class PuiseuxTrunc:
    """A series ``sum c_e t^e`` known modulo ``t^trunc``.

    Terms are sorted by exponent, every exponent is below ``trunc`` and every
    stored coefficient is nonzero. A series without terms is zero up to its
    truncation order, which is a different state from an exact zero: asking
    for its valuation raises ``ZeroUpToTruncation``.
    """

    ring: CoeffRing
    terms: Tuple[Term, ...]
    trunc: Fraction

    # -- construction -------------------------------------------------------

    @classmethod
    def from_terms(
        cls,
        ring: CoeffRing,
        terms: Iterable[Tuple[Number, Any]],
        trunc: Number,
    ) -> "PuiseuxTrunc":
        """Build a series from (exponent, coefficient) pairs in any order.

        Coefficients with equal exponents are added; zero coefficients and
        exponents at or beyond ``trunc`` are dropped.
        """
        trunc = _as_fraction(trunc)
        collected: Dict[Fraction, RingElem] = {}
        for exponent, coefficient in terms:
            exponent = _as_fraction(exponent)
            if exponent >= trunc:
                continue
            coefficient = ring.element(coefficient)
            if exponent in collected:
                collected[exponent] = collected[exponent] + coefficient
            else:
                collected[exponent] = coefficient
        return cls._build(ring, collected, trunc)

    @classmethod
    def _build(
        cls, ring: CoeffRing, collected: Dict[Fraction, RingElem], trunc: Fraction
    ) -> "PuiseuxTrunc":
        terms = tuple(
            (exponent, collected[exponent])
            for exponent in sorted(collected)
            if exponent < trunc and collected[exponent].rep
        )
        return cls(ring, terms, trunc)

    @classmethod
    def zero(cls, ring: CoeffRing, trunc: Number) -> "PuiseuxTrunc":
        return cls(ring, (), _as_fraction(trunc))

    @classmethod
    def constant(cls, ring: CoeffRing, value: Any, trunc: Number) -> "PuiseuxTrunc":
        return cls.from_terms(ring, [(0, value)], trunc)

    @classmethod
    def monomial(
        cls, ring: CoeffRing, coefficient: Any, exponent: Number, trunc: Number
    ) -> "PuiseuxTrunc":
        """Return ``coefficient * t^exponent + O(t^trunc)``."""
        return cls.from_terms(ring, [(exponent, coefficient)], trunc)

    # -- inspection ---------------------------------------------------------

    def is_zero_to_precision(self) -> bool:
        return not self.terms

    def _order(self) -> Fraction:
        # Lower bound on the valuation, used to propagate truncation orders.
        return self.terms[0][0] if self.terms else self.trunc

    def leading(self) -> Term:
        """Return (valuation, leading coefficient).

        Raises:
            ZeroUpToTruncation: If no term survives the truncation
            DynamicSplit: If the leading coefficient is a zero divisor
        """
        if not self.terms:
            raise ZeroUpToTruncation(f"Series is zero up to O(t^{self.trunc})")
        exponent, coefficient = self.terms[0]
        coefficient.is_invertible()
        return exponent, coefficient

    def valuation(self) -> Fraction:
        return self.leading()[0]

    def leading_coefficient(self) -> RingElem:
        return self.leading()[1]

    def coefficient(self, exponent: Number) -> RingElem:
        """Return the coefficient of ``t^exponent`` (zero if absent).

        Raises:
            ValueError: If the exponent is not below the truncation order
        """
        exponent = _as_fraction(exponent)
        if exponent >= self.trunc:
            raise ValueError(f"t^{exponent} is beyond the truncation O(t^{self.trunc})")
        for e, c in self.terms:
            if e == exponent:
                return c
        return self.ring.zero()

    def agrees_with(self, other: "PuiseuxTrunc") -> bool:
        """True when both series coincide up to the smaller truncation order."""
        return (self - other).is_zero_to_precision()

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other: Any) -> "PuiseuxTrunc":
        if isinstance(other, PuiseuxTrunc):
            if other.ring != self.ring:
                raise ValueError("Series have different coefficient rings")
            return other
        return PuiseuxTrunc.constant(self.ring, other, max(self.trunc, Fraction(1)))

    def __add__(self, other: Any) -> "PuiseuxTrunc":
        if not isinstance(other, PuiseuxTrunc):
            return self._add_scalar(self.ring.element(other))
        other = self._coerce(other)
        trunc = min(self.trunc, other.trunc)
        collected: Dict[Fraction, RingElem] = {}
        for exponent, coefficient in self.terms + other.terms:
            if exponent >= trunc:
                continue
            if exponent in collected:
                collected[exponent] = collected[exponent] + coefficient
            else:
                collected[exponent] = coefficient
        return PuiseuxTrunc._build(self.ring, collected, trunc)

    __radd__ = __add__

    def _add_scalar(self, value: RingElem) -> "PuiseuxTrunc":
        if not value.rep or self.trunc <= 0:
            return self
        collected = dict(self.terms)
        zero = Fraction(0)
        collected[zero] = collected[zero] + value if zero in collected else value
        return PuiseuxTrunc._build(self.ring, collected, self.trunc)

    def __neg__(self) -> "PuiseuxTrunc":
        return PuiseuxTrunc(self.ring, tuple((e, -c) for e, c in self.terms), self.trunc)

    def __sub__(self, other: Any) -> "PuiseuxTrunc":
        return self + (-other)

    def __rsub__(self, other: Any) -> "PuiseuxTrunc":
        return (-self) + other

    def scale(self, value: Any) -> "PuiseuxTrunc":
        """Multiply by an exact scalar from the coefficient ring."""
        value = self.ring.element(value)
        return PuiseuxTrunc._build(
            self.ring, {e: c * value for e, c in self.terms}, self.trunc
        )

    def shift(self, exponent: Number) -> "PuiseuxTrunc":
        """Multiply by ``t^exponent``."""
        exponent = _as_fraction(exponent)
        return PuiseuxTrunc(
            self.ring,
            tuple((e + exponent, c) for e, c in self.terms),
            self.trunc + exponent,
        )

    def __mul__(self, other: Any) -> "PuiseuxTrunc":
        if not isinstance(other, PuiseuxTrunc):
            return self.scale(other)
        other = self._coerce(other)
        trunc = min(self.trunc + other._order(), other.trunc + self._order())
        collected: Dict[Fraction, RingElem] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                exponent = e1 + e2
                if exponent >= trunc:
                    break
                product = c1 * c2
                if exponent in collected:
                    collected[exponent] = collected[exponent] + product
                else:
                    collected[exponent] = product
        return PuiseuxTrunc._build(self.ring, collected, trunc)

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxTrunc":
        """Return the inverse, known modulo ``t^(trunc - 2 * valuation)``.

        Raises:
            ZeroUpToTruncation: If the series is zero up to truncation
            DynamicSplit: If the leading coefficient is a zero divisor
        """
        valuation, leading = self.leading()
        leading_inverse = leading.inverse()
        # self = leading * t^v * (1 + u) with val(u) > 0
        unit = self.shift(-valuation).scale(leading_inverse)
        u = unit - 1
        result = PuiseuxTrunc.constant(self.ring, 1, unit.trunc)
        power = result
        while True:
            # Capped at the unit's order so terms beyond it fall off.
            power = PuiseuxTrunc._build(self.ring, dict((power * (-u)).terms), unit.trunc)
            if not power.terms:
                break
            result = result + power
        return result.scale(leading_inverse).shift(-valuation)

    def __truediv__(self, other: Any) -> "PuiseuxTrunc":
        if not isinstance(other, PuiseuxTrunc):
            return self.scale(self.ring.element(other).inverse())
        return self * other.inverse()

    def __pow__(self, exponent: int) -> "PuiseuxTrunc":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        if exponent == 0:
            return PuiseuxTrunc.constant(self.ring, 1, max(self.trunc, Fraction(1)))
        result: Optional[PuiseuxTrunc] = None
        base = self
        while exponent:
            if exponent & 1:
                result = base if result is None else result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def powers(self, count: int) -> List["PuiseuxTrunc"]:
        """Return ``[1, self, self^2, ..., self^count]``."""
        result = [PuiseuxTrunc.constant(self.ring, 1, max(self.trunc, Fraction(1)))]
        if count >= 1:
            result.append(self)
        for _ in range(count - 1):
            result.append(result[-1] * self)
        return result

    def truncate(self, trunc: Number) -> "PuiseuxTrunc":
        """Forget every term at or beyond a smaller truncation order."""
        trunc = _as_fraction(trunc)
        if trunc > self.trunc:
            raise ValueError("Cannot raise the truncation order of a series")
        return PuiseuxTrunc(self.ring, tuple(t for t in self.terms if t[0] < trunc), trunc)

    # -- display ------------------------------------------------------------

    def __str__(self) -> str:
        parts = []
        for exponent, coefficient in self.terms:
            parts.append(f"({coefficient})*t^({exponent})")
        parts.append(f"O(t^({self.trunc}))")
        return " + ".join(parts)


def eval_intpoly_at_series(poly: Poly, b: PuiseuxTrunc) -> PuiseuxTrunc:
    """Evaluate an integer polynomial at a series by Horner's rule.

    Truncation orders propagate through each multiplication, so the result is
    certified modulo its own ``trunc``.
    """
    coefficients = [int(c) for c in poly.all_coeffs()] if not poly.is_zero else []
    if not coefficients:
        return PuiseuxTrunc.zero(b.ring, b.trunc)
    if len(coefficients) == 1:
        return PuiseuxTrunc.constant(b.ring, coefficients[0], b.trunc)
    result = b.scale(coefficients[0]) + coefficients[1]
    for coefficient in coefficients[2:]:
        result = result * b + coefficient
    return result


def eval_with_powers(
    coefficients: Sequence[Any], powers: Sequence[PuiseuxTrunc]
) -> PuiseuxTrunc:
    """Evaluate ``sum coefficients[k] * powers[k]``.

    Coefficients may be integers, ring elements or series. The list of powers
    must be at least as long as the list of coefficients.
    """
    if len(powers) < len(coefficients):
        raise ValueError("Not enough powers for the given coefficients")
    total: Optional[PuiseuxTrunc] = None
    for coefficient, power in zip(coefficients, powers):
        if isinstance(coefficient, PuiseuxTrunc):
            term = coefficient * power
        elif isinstance(coefficient, int) and coefficient == 0:
            continue
        else:
            term = power.scale(coefficient)
        total = term if total is None else total + term
    if total is None:
        return PuiseuxTrunc.zero(powers[0].ring, powers[0].trunc)
    return total


def intpoly_with_powers(poly: Poly, powers: Sequence[PuiseuxTrunc]) -> PuiseuxTrunc:
    """Evaluate an integer polynomial from precomputed powers of its argument."""
    coefficients = [int(c) for c in reversed(poly.all_coeffs())] if not poly.is_zero else []
    return eval_with_powers(coefficients, powers)
