"""The minors D_J of the node-condition matrix and their arithmetic.

For ``J = {i1, i2, i3, i4}`` the matrix ``M_J(x)`` has the columns
``(1, i, x^i, i * x^i)`` for ``i`` in ``J``; ``D_J`` is its determinant, an
integer polynomial in the location ``x`` of the second node.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from sympy import Matrix, Poly, divisors

from ..errors import InvariantViolation
from .arith import (
    X,
    CoeffRing,
    RingElem,
    cyclotomic,
    eval_at,
    monomial_poly,
    order_at_zero,
    root_multiplicity,
    squarefree_part,
    strip_factor,
)
from .precision import PrecisionPolicy, initial_trunc, with_precision
from .puiseux import PuiseuxTrunc, eval_intpoly_at_series

logger = logging.getLogger(__name__)

IndexSet4 = Tuple[int, int, int, int]

EXCEPTIONAL_BASES: Tuple[IndexSet4, ...] = (
    (0, 1, 2, 3),
    (0, 1, 2, 4),
    (0, 2, 3, 4),
    (0, 3, 4, 6),
    (0, 2, 3, 6),
)


def index_set(indices: Iterable[int]) -> IndexSet4:
    """Validate and sort four distinct nonnegative indices.

    Raises:
        ValueError: If there are not exactly four distinct nonnegative indices
    """
    values = sorted(int(i) for i in indices)
    if len(values) != 4 or len(set(values)) != 4:
        raise ValueError(f"Expected four distinct indices, got {values}")
    if values[0] < 0:
        raise ValueError(f"Indices must be nonnegative, got {values}")
    return tuple(values)


def _role_order(indices: Sequence[int]) -> Tuple[int, ...]:
    values = tuple(int(i) for i in indices)
    if len(values) != 4 or len(set(values)) != 4:
        raise ValueError(f"Expected four distinct indices, got {list(values)}")
    return values


@dataclass(frozen=True)
class MinorPoly:
    """``D_J`` together with the index set it comes from."""

    J: IndexSet4
    poly: Poly

    @property
    def degree(self) -> int:
        return self.poly.degree()

    @property
    def order(self) -> int:
        return order_at_zero(self.poly)

    @property
    def leading_coefficient(self) -> int:
        return int(self.poly.LC())

    @property
    def trailing_coefficient(self) -> int:
        return int(self.poly.coeff_monomial(X**self.order))

    def is_palindromic(self) -> bool:
        """Check ``D(x) = x^(order + degree) * D(1/x)``."""
        coefficients = [int(c) for c in self.poly.all_coeffs()][: self.degree - self.order + 1]
        return coefficients == coefficients[::-1]

    def evaluate(self, value: RingElem) -> RingElem:
        return eval_at(self.poly, value)

    def __str__(self) -> str:
        return str(self.poly.as_expr())


def _x_power_minus_one(exponent: int) -> Poly:
    return monomial_poly(exponent) - 1


@lru_cache(maxsize=4096)
def _minor_cached(J: IndexSet4) -> Poly:
    i1 = J[0]
    i, j, k = (J[1] - i1, J[2] - i1, J[3] - i1)
    base = (
        monomial_poly(i) * _x_power_minus_one(k - i) * _x_power_minus_one(j) * (i * k)
        - monomial_poly(i) * _x_power_minus_one(j - i) * _x_power_minus_one(k) * (i * j)
        - monomial_poly(j) * _x_power_minus_one(k - j) * _x_power_minus_one(i) * (j * k)
    )
    return base * monomial_poly(2 * i1)


def minor_poly(J: Iterable[int]) -> MinorPoly:
    """Return ``D_J`` for the sorted index set ``J``.

    The closed form is evaluated for ``J - i1`` and multiplied by
    ``x^(2 * i1)``; ``direct_minor`` is the brute-force cross-check.

    Args:
        J: Four distinct nonnegative indices in any order

    Returns:
        MinorPoly for the sorted set
    """
    key = index_set(J)
    return MinorPoly(key, _minor_cached(key))


def direct_minor(J: Iterable[int]) -> Poly:
    """Expand ``det(M_J(x))`` directly (independent of the closed form)."""
    key = index_set(J)
    matrix = Matrix(
        [
            [1 for _ in key],
            [i for i in key],
            [X**i for i in key],
            [i * X**i for i in key],
        ]
    )
    return Poly(matrix.det(method="berkowitz").expand(), X, domain="ZZ")


def unity_root_multiplicity(J: Iterable[int], d: int) -> int:
    """Multiplicity of the primitive d-th roots of unity as roots of ``D_J``."""
    _, count = strip_factor(minor_poly(J).poly, cyclotomic(d))
    return count


def gap_gcds(J: Iterable[int]) -> Tuple[int, int, int, int]:
    """Return ``(s1, s2, s3, s4)``.

    ``s_j`` is the gcd of the gaps between the three indices left after
    dropping ``i_j``; a root of unity whose order divides ``s_j`` makes those
    three powers coincide.
    """
    i1, i2, i3, i4 = index_set(J)
    return (
        gcd(i3 - i2, i4 - i2),
        gcd(i4 - i1, i3 - i1),
        gcd(i4 - i1, i2 - i1),
        gcd(i3 - i1, i2 - i1),
    )


class ExceptionalImage(NamedTuple):
    """``J = base * s + r`` for an exceptional ``base``."""

    base: IndexSet4
    s: int
    r: int


def is_exceptional_affine(J: Iterable[int]) -> Optional[ExceptionalImage]:
    """Decide whether J is a scaled translate of an exceptional configuration."""
    key = index_set(J)
    r = key[0]
    shifted = tuple(i - r for i in key)
    for base in EXCEPTIONAL_BASES:
        s, remainder = divmod(shifted[3], base[3])
        if remainder or s < 1:
            continue
        if all(a == s * b for a, b in zip(shifted, base)):
            return ExceptionalImage(base, s, r)
    return None


def _three_equal_orders(J: IndexSet4) -> List[int]:
    orders = set()
    for s in gap_gcds(J):
        orders.update(e for e in divisors(s) if e > 1)
    return sorted(orders)


def nontrivial_part(J: Iterable[int]) -> Poly:
    """Return ``D_J / (x^order * (x - 1)^4)``."""
    minor = minor_poly(J)
    quotient, remainder = minor.poly.div(monomial_poly(minor.order))
    if not remainder.is_zero:
        raise InvariantViolation(f"x^{minor.order} does not divide D_{minor.J}")
    quotient, count = strip_factor(quotient, cyclotomic(1))
    if count != 4:
        raise InvariantViolation(f"1 is a root of D_{minor.J} of multiplicity {count}, expected 4")
    return quotient


def strip_three_equal_factors(J: Iterable[int], poly: Poly) -> Poly:
    """Divide out every cyclotomic factor whose roots make three powers equal."""
    key = index_set(J)
    for e in _three_equal_orders(key):
        poly, count = strip_factor(poly, cyclotomic(e))
        if count:
            logger.debug("D_%s: Phi_%d appears with multiplicity %d", key, e, count)
    return poly


def all_roots_three_powers_equal(J: Iterable[int]) -> bool:
    """True iff every root of ``D_J`` other than 0 and 1 forces three equal powers.

    Certified by exact division: after removing ``x^order``, ``(x - 1)^4``
    and the cyclotomic factors of orders dividing some ``s_j`` nothing but a
    constant may remain.
    """
    remainder = strip_three_equal_factors(J, nontrivial_part(J))
    return remainder.degree() == 0


def triple_root_forces_unity(J: Iterable[int]) -> bool:
    """Check that roots of multiplicity >= 3 are roots of unity with all powers equal.

    Returns:
        True when every root of ``D_J`` outside {0, 1} of multiplicity at
        least 3 is a primitive e-th root of unity with e dividing every gap
    """
    key = index_set(J)
    poly = nontrivial_part(key)
    orders = set()
    for a in key:
        for b in key:
            if b > a:
                orders.update(e for e in divisors(b - a) if e > 1)
    for e in sorted(orders):
        poly, count = strip_factor(poly, cyclotomic(e))
        if count >= 3 and any((i - key[0]) % e for i in key):
            logger.debug("D_%s has Phi_%d to the power %d without equal powers", key, e, count)
            return False
    if poly.degree() < 3:
        return True
    first = poly.diff(X)
    common = poly.gcd(first).gcd(first.diff(X))
    return common.degree() == 0


def val_dj_perturbed(
    J: Sequence[int],
    d: int,
    v: Union[int, Fraction],
    h: Union[int, Fraction, RingElem] = 1,
    policy: Optional[PrecisionPolicy] = None,
) -> Fraction:
    """Valuation of ``D_J(beta + h t^v)`` for a primitive d-th root of unity beta.

    Args:
        J: Indices in role order ``(i1, i2, i3, i4)``; the first three must be
            congruent modulo ``d``
        d: Order of beta, at least 2
        v: Positive exponent of the perturbation
        h: Nonzero perturbation coefficient
        policy: Precision policy for the series evaluation

    Returns:
        The valuation: ``4v`` when d divides ``i4 - i1``, ``v`` otherwise

    Raises:
        ValueError: If the preconditions fail
        InvariantViolation: If the computed valuation contradicts the criterion
        PrecisionExhausted: If the leading term stays ambiguous
    """
    roles = _role_order(J)
    i1, i2, i3, i4 = roles
    v = Fraction(v)
    if d < 2 or gcd(abs(i3 - i1), abs(i2 - i1)) % d:
        raise ValueError(f"Order {d} must be > 1 and divide gcd(i3 - i1, i2 - i1) for {roles}")
    if v <= 0:
        raise ValueError(f"Perturbation exponent must be positive, got {v}")
    ring = CoeffRing.cyclotomic(d)
    h = ring.element(h)
    if h.is_zero():
        raise ValueError("Perturbation coefficient must be nonzero")
    poly = minor_poly(roles).poly

    def attempt(trunc: Fraction) -> Fraction:
        b = PuiseuxTrunc.from_terms(ring, [(0, ring.gen()), (v, h)], trunc)
        return eval_intpoly_at_series(poly, b).valuation()

    valuation = with_precision(attempt, initial_trunc(v), policy, what=f"val D_{roles}(b)")
    expected = 4 * v if (i4 - i1) % d == 0 else v
    if valuation != expected:
        raise InvariantViolation(
            f"val D_{roles}(beta + h t^{v}) = {valuation}, expected {expected} (d={d})"
        )
    return valuation


def diophantine_pairs(bound: int) -> List[Tuple[int, int]]:
    """All ``(n, m)`` with ``1 < n <= bound``, ``1 <= m <= bound``, ``m | n`` and ``(n - 1) | (m + 1)``."""
    return [
        (n, m)
        for n in range(2, bound + 1)
        for m in range(1, bound + 1)
        if n % m == 0 and (m + 1) % (n - 1) == 0
    ]


def _rank(rows: List[List[RingElem]]) -> int:
    rows = [list(row) for row in rows]
    rank = 0
    columns = len(rows[0]) if rows else 0
    for column in range(columns):
        pivot = None
        for r in range(rank, len(rows)):
            if rows[r][column].is_invertible():
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inverse = rows[rank][column].inverse()
        for r in range(len(rows)):
            if r != rank and not rows[r][column].is_zero():
                factor = rows[r][column] * inverse
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def matrix_at(J: Sequence[int], beta: RingElem) -> List[List[RingElem]]:
    """Return ``M_J(beta)`` as rows of ring elements."""
    ring = beta.ring
    powers = [beta**i for i in J]
    return [
        [ring.one() for _ in J],
        [ring.element(i) for i in J],
        powers,
        [p * i for p, i in zip(powers, J)],
    ]


def rank_MJ_at(J: Iterable[int], beta: RingElem) -> int:
    """Rank of ``M_J(beta)`` by exact elimination.

    Raises:
        ValueError: If beta is zero
        DynamicSplit: If a pivot is a zero divisor of a dynamic ring
    """
    if beta.is_zero():
        raise ValueError("beta must be nonzero")
    return _rank(matrix_at(index_set(J), beta))


def power_pattern(J: Sequence[int], beta: RingElem) -> Tuple[Tuple[int, ...], ...]:
    """Partition J into groups of indices with equal powers of beta."""
    groups: List[List[int]] = []
    representatives: List[RingElem] = []
    for i in J:
        power = beta**i
        for group, representative in zip(groups, representatives):
            if not (power - representative).is_invertible():
                group.append(i)
                break
        else:
            groups.append([i])
            representatives.append(power)
    return tuple(tuple(group) for group in groups)


def pattern_sizes(pattern: Tuple[Tuple[int, ...], ...]) -> Tuple[int, ...]:
    return tuple(sorted((len(group) for group in pattern), reverse=True))


def repeated_at_most_once(J: Sequence[int], beta: RingElem) -> bool:
    """True when no power of beta occurs more than twice among ``beta^i``, i in J."""
    return pattern_sizes(power_pattern(J, beta))[0] <= 2


def good_second_indices(
    J: Iterable[int], beta: RingElem, candidates: Iterable[int]
) -> List[int]:
    """Indices ``i`` off J with ``D_{(J + i) - i1}(beta)`` invertible."""
    key = index_set(J)
    rest = key[1:]
    good = []
    for i in candidates:
        if i in key:
            continue
        if minor_poly(rest + (i,)).evaluate(beta).is_invertible():
            good.append(i)
    return good


@dataclass(frozen=True)
class VanishingReport:
    """Minors of the five 4-subsets of ``indices`` evaluated at beta.

    Entry ``j`` of ``vanishing`` and ``multiplicities`` refers to the subset
    that omits ``indices[j]``.
    """

    indices: Tuple[int, ...]
    vanishing: Tuple[bool, ...]
    multiplicities: Tuple[int, ...]
    pattern: Tuple[Tuple[int, ...], ...]

    def all_vanish(self) -> bool:
        return all(self.vanishing)

    def vanishing_subsets(self) -> List[IndexSet4]:
        return [self.subset(j) for j, flag in enumerate(self.vanishing) if flag]

    def subset(self, omitted: int) -> IndexSet4:
        return index_set(i for k, i in enumerate(self.indices) if k != omitted)

    def as_dict(self) -> Dict[str, object]:
        return {
            "indices": list(self.indices),
            "vanishing": list(self.vanishing),
            "multiplicities": list(self.multiplicities),
            "pattern": [list(group) for group in self.pattern],
        }


def check_vanishing_pattern(J5: Sequence[int], beta: RingElem) -> VanishingReport:
    """Evaluate the five 4-subset minors of ``J5`` at beta and check their pattern.

    ``J5`` is in role order: the first four indices form J, the fifth is the
    added index. When ``D_J(beta) = 0`` and the powers of beta on J are not
    three equal plus one different, either every minor vanishes or none of
    the four that contain the fifth index does. Roots of multiplicity at
    least 3 must have all powers equal, and when all five vanish with powers
    repeated at most once a multiple root of ``D_J`` is a multiple root of
    the other four.

    Raises:
        ValueError: If J5 is not five distinct indices or beta is 0 or 1
        InvariantViolation: If one of the identities above fails
    """
    indices = tuple(int(i) for i in J5)
    if len(indices) != 5 or len(set(indices)) != 5:
        raise ValueError(f"Expected five distinct indices, got {list(indices)}")
    if not beta.is_invertible() or not (beta - 1).is_invertible():
        raise ValueError("beta must differ from 0 and 1")

    vanishing = []
    multiplicities = []
    for omitted in range(5):
        subset = index_set(i for k, i in enumerate(indices) if k != omitted)
        poly = minor_poly(subset).poly
        zero = not eval_at(poly, beta).is_invertible()
        vanishing.append(zero)
        multiplicities.append(root_multiplicity(poly, beta) if zero else 0)
        if multiplicities[-1] >= 3 and len(power_pattern(subset, beta)) != 1:
            raise InvariantViolation(
                f"beta is a root of D_{subset} of multiplicity {multiplicities[-1]} "
                "but its powers are not all equal"
            )

    pattern = power_pattern(indices[:4], beta)
    report = VanishingReport(indices, tuple(vanishing), tuple(multiplicities), pattern)
    if not vanishing[4]:
        return report

    if pattern_sizes(pattern) == (3, 1):
        logger.warning(
            "Powers of beta on %s are three equal and one different; "
            "vanishing dichotomy not checked",
            indices[:4],
        )
        return report
    if not report.all_vanish() and any(vanishing[:4]):
        raise InvariantViolation(
            f"Minors of {indices} vanish at beta only for {report.vanishing_subsets()}"
        )
    if report.all_vanish() and pattern_sizes(pattern)[0] <= 2 and multiplicities[4] >= 2:
        if min(multiplicities[:4]) < 2:
            raise InvariantViolation(
                f"beta is a multiple root of D_{report.subset(4)} but multiplicities "
                f"of the other minors are {multiplicities[:4]}"
            )
    return report


def squarefree_nontrivial_part(J: Iterable[int]) -> Poly:
    """Squarefree polynomial whose roots are the candidate betas for a type II cell."""
    poly = squarefree_part(nontrivial_part(J))
    return strip_three_equal_factors(J, poly)
