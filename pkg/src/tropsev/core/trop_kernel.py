"""Tropicalization of kernels of full-rank matrices over Puiseux series.

A weight vector ``w`` lies in the tropicalization of ``ker(M)`` iff for every
set ``J`` of ``d - 1`` columns with ``rank(M_J) = d - 1`` the minimum of
``val(det(M_{J + k})) + w_k`` over ``k`` is attained at least twice. The
vectors ``r_{J,k} = (-1)^{#(J < k)} det(M_{J + k})`` are the circuits of the
row span, so the same test can be run circuit by circuit.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from ..errors import PrecisionExhausted, ZeroUpToTruncation
from .arith import CoeffRing
from .precision import PrecisionPolicy, initial_trunc, with_precision
from .puiseux import PuiseuxTrunc

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
Columns = Tuple[int, ...]

# Minor of a d-subset of columns; None means certified to be exactly zero.
MinorTable = Dict[Columns, Optional[PuiseuxTrunc]]

# Row of M' dropped by the bivariate fixture, keyed by exact (b1, b2).
ESTEROV_REMOVED_ROW = {(-1, 1): 4, (-1, -1): 4, (1, -1): 5}
ESTEROV_DEFAULT_ROW = 3


@dataclass(frozen=True)
class ValMatrix:
    """A ``d x (n+1)`` matrix of truncated series over one coefficient ring.

    Attributes:
        rows: Matrix entries, row by row
        rebuild: Rebuilds the same matrix at another truncation order. Only
            matrices whose entries are known exactly can be rebuilt.
        exponent_bound: When the entries are exact Puiseux polynomials, an
            upper bound on every exponent occurring in a maximal minor. A
            minor that vanishes modulo ``t^T`` with ``T`` above this bound is
            exactly zero.
    """

    rows: Tuple[Tuple[PuiseuxTrunc, ...], ...]
    rebuild: Optional[Callable[[Fraction], "ValMatrix"]] = field(
        default=None, compare=False, repr=False
    )
    exponent_bound: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if not self.rows or not self.rows[0]:
            raise ValueError("Matrix must have at least one row and one column")
        width = len(self.rows[0])
        if any(len(row) != width for row in self.rows):
            raise ValueError("Matrix rows have different lengths")
        if len(self.rows) > width:
            raise ValueError(
                f"Matrix has more rows ({len(self.rows)}) than columns ({width})"
            )
        rings = {entry.ring for row in self.rows for entry in row}
        if len(rings) != 1:
            raise ValueError("Matrix entries must share one coefficient ring")

    @classmethod
    def constant(
        cls, rows: Sequence[Sequence[Rational]], ring: Optional[CoeffRing] = None
    ) -> "ValMatrix":
        """Matrix with exact rational entries (valuation zero or infinity)."""
        ring = ring or CoeffRing.rationals()
        frozen = tuple(tuple(Fraction(v) for v in row) for row in rows)

        def build(trunc: Fraction) -> "ValMatrix":
            return cls(
                tuple(
                    tuple(PuiseuxTrunc.constant(ring, v, trunc) for v in row)
                    for row in frozen
                ),
                build,
                Fraction(0),
            )

        return build(Fraction(1))

    @classmethod
    def from_series(cls, rows: Sequence[Sequence[PuiseuxTrunc]]) -> "ValMatrix":
        """Matrix of series known only to their own truncation orders."""
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def exact(
        cls,
        ring: CoeffRing,
        rows: Sequence[Sequence[Sequence[Tuple[Rational, object]]]],
    ) -> "ValMatrix":
        """Matrix whose entries are Puiseux polynomials given as term lists.

        Args:
            ring: Coefficient ring
            rows: ``rows[r][c]`` lists the ``(exponent, coefficient)`` terms
                of entry ``(r, c)``
        """
        frozen = tuple(
            tuple(tuple((Fraction(e), c) for e, c in entry) for entry in row)
            for row in rows
        )
        bound = sum(
            (
                max(
                    (e for entry in row for e, _ in entry),
                    default=Fraction(0),
                )
                for row in frozen
            ),
            Fraction(0),
        )
        bound = max(bound, Fraction(0))

        def build(trunc: Fraction) -> "ValMatrix":
            return cls(
                tuple(
                    tuple(PuiseuxTrunc.from_terms(ring, entry, trunc) for entry in row)
                    for row in frozen
                ),
                build,
                bound,
            )

        return build(initial_trunc(bound))

    @property
    def d(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def ring(self) -> CoeffRing:
        return self.rows[0][0].ring

    @property
    def trunc(self) -> Fraction:
        return min(entry.trunc for row in self.rows for entry in row)

    def at(self, trunc: Fraction) -> "ValMatrix":
        if self.rebuild is None or trunc == self.trunc:
            return self
        return self.rebuild(trunc)

    def drop_row(self, index: int) -> "ValMatrix":
        if not 0 <= index < self.d:
            raise ValueError(f"Row {index} out of range 0..{self.d - 1}")
        rebuild = self.rebuild
        return ValMatrix(
            self.rows[:index] + self.rows[index + 1:],
            None if rebuild is None else (lambda trunc: rebuild(trunc).drop_row(index)),
            self.exponent_bound,
        )

    def certifies_zero(self, minor: PuiseuxTrunc) -> bool:
        return (
            minor.is_zero_to_precision()
            and self.exponent_bound is not None
            and minor.trunc > self.exponent_bound
        )


@dataclass(frozen=True)
class Circuit:
    """A circuit ``r_J`` of the row span, stored on its support."""

    J: Columns
    entries: Tuple[Tuple[int, PuiseuxTrunc], ...]

    @property
    def support(self) -> Columns:
        return tuple(k for k, _ in self.entries)

    def valuations(self) -> Dict[int, Fraction]:
        return {k: entry.valuation() for k, entry in self.entries}


@dataclass(frozen=True)
class KernelMembership:
    """Outcome of a tropical kernel test.

    On refusal, ``violating_J`` is the column set whose minimum is attained
    once and ``minimizer`` the column attaining it.
    """

    member: bool
    violating_J: Optional[Columns] = None
    minimizer: Optional[int] = None

    def __bool__(self) -> bool:
        return self.member


def laplace_det(rows: Sequence[Sequence[PuiseuxTrunc]], columns: Columns) -> PuiseuxTrunc:
    """Determinant of the square submatrix on ``columns`` by Laplace expansion.

    Expansion runs along successive rows; the minors of the lower rows are
    shared between branches.
    """
    size = len(columns)
    if size != len(rows):
        raise ValueError(f"Need {len(rows)} columns for a square minor, got {size}")
    memo: Dict[Columns, PuiseuxTrunc] = {}

    def expand(depth: int, remaining: Columns) -> PuiseuxTrunc:
        if depth == size - 1:
            return rows[depth][remaining[0]]
        if remaining in memo:
            return memo[remaining]
        total: Optional[PuiseuxTrunc] = None
        for position, column in enumerate(remaining):
            rest = remaining[:position] + remaining[position + 1:]
            term = rows[depth][column] * expand(depth + 1, rest)
            if position % 2:
                term = -term
            total = term if total is None else total + term
        memo[remaining] = total
        return total

    return expand(0, tuple(columns))


def circuit_sign(k: int, J: Sequence[int]) -> int:
    """Sign of the permutation putting ``k`` in place among sorted ``J``."""
    return -1 if sum(1 for j in J if j < k) % 2 else 1


def _minor_table(M: ValMatrix, threads: int) -> MinorTable:
    subsets = list(combinations(range(M.width), M.d))

    def minor(columns: Columns) -> Optional[PuiseuxTrunc]:
        value = laplace_det(M.rows, columns)
        if value.is_zero_to_precision():
            if M.certifies_zero(value):
                return None
            raise ZeroUpToTruncation(
                f"Minor on columns {columns} vanishes modulo O(t^{value.trunc})"
            )
        value.valuation()
        return value

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(minor, subsets))
    else:
        values = [minor(columns) for columns in subsets]
    table = dict(zip(subsets, values))
    if all(value is None for value in values):
        raise ValueError(f"Matrix does not have full row rank {M.d}")
    return table


def maximal_minors(
    M: ValMatrix, policy: Optional[PrecisionPolicy] = None, threads: int = 1
) -> MinorTable:
    """Return every ``d x d`` minor, certified nonzero or exactly zero.

    Raises:
        PrecisionExhausted: If some minor stays ambiguous
        ValueError: If every maximal minor is zero
    """
    if M.rebuild is None:
        try:
            return _minor_table(M, threads)
        except ZeroUpToTruncation as e:
            raise PrecisionExhausted(
                f"Minor ambiguous and the matrix cannot be rebuilt: {e}"
            ) from e
    start = M.trunc
    if M.exponent_bound is not None:
        start = max(start, initial_trunc(M.exponent_bound))
    return with_precision(
        lambda trunc: _minor_table(M.at(trunc), threads),
        start,
        policy,
        "maximal minors",
    )


def _check_weight(M: ValMatrix, w: Sequence[Rational]) -> List[Fraction]:
    if len(w) != M.width:
        raise ValueError(f"Weight has {len(w)} entries, matrix has {M.width} columns")
    return [Fraction(v) for v in w]


def _circuit_from_table(J: Columns, table: MinorTable, width: int) -> Optional[Circuit]:
    entries = []
    for k in range(width):
        if k in J:
            continue
        value = table[tuple(sorted(J + (k,)))]
        if value is not None:
            entries.append((k, value if circuit_sign(k, J) > 0 else -value))
    if not entries:
        return None
    return Circuit(J, tuple(entries))


def _minimizers(values: Dict[int, Fraction]) -> List[int]:
    smallest = min(values.values())
    return [k for k, value in values.items() if value == smallest]


def in_trop_kernel(
    M: ValMatrix,
    w: Sequence[Rational],
    policy: Optional[PrecisionPolicy] = None,
    threads: int = 1,
) -> KernelMembership:
    """Decide whether ``w`` lies in the tropicalization of ``ker(M)``.

    Args:
        M: Full-rank matrix
        w: One weight per column
        policy: Precision retry policy
        threads: Worker threads for the minor computations

    Returns:
        KernelMembership, with the first violating column set on refusal

    Raises:
        PrecisionExhausted: If a needed minor's valuation stays ambiguous
        ValueError: If ``w`` has the wrong length or ``M`` is rank deficient
    """
    weights = _check_weight(M, w)
    table = maximal_minors(M, policy, threads)
    for J in combinations(range(M.width), M.d - 1):
        values = {}
        for k in range(M.width):
            if k in J:
                continue
            minor = table[tuple(sorted(J + (k,)))]
            if minor is not None:
                values[k] = minor.valuation() + weights[k]
        if not values:
            # rank(M_J) < d - 1
            continue
        minimizers = _minimizers(values)
        if len(minimizers) == 1:
            logger.debug("Minimum for J=%s attained only at k=%d", J, minimizers[0])
            return KernelMembership(False, J, minimizers[0])
    return KernelMembership(True)


def circuits(
    M: ValMatrix, policy: Optional[PrecisionPolicy] = None, threads: int = 1
) -> List[Circuit]:
    """Return the circuits ``r_J`` of ``M``, one per support.

    Raises:
        PrecisionExhausted: If a needed minor's valuation stays ambiguous
    """
    table = maximal_minors(M, policy, threads)
    found: Dict[Columns, Circuit] = {}
    for J in combinations(range(M.width), M.d - 1):
        circuit = _circuit_from_table(J, table, M.width)
        if circuit is not None and circuit.support not in found:
            found[circuit.support] = circuit
    logger.debug("Found %d circuits with distinct supports", len(found))
    return list(found.values())


def in_trop_kernel_via_circuits(
    M: ValMatrix,
    w: Sequence[Rational],
    policy: Optional[PrecisionPolicy] = None,
    threads: int = 1,
) -> KernelMembership:
    """Decide membership through the circuits, which form a tropical basis."""
    weights = _check_weight(M, w)
    for circuit in circuits(M, policy, threads):
        values = {k: v + weights[k] for k, v in circuit.valuations().items()}
        minimizers = _minimizers(values)
        if len(minimizers) == 1:
            return KernelMembership(False, circuit.J, minimizers[0])
    return KernelMembership(True)


def _max_exponent(series: PuiseuxTrunc) -> Fraction:
    return max((e for e, _ in series.terms), default=Fraction(0))


def severi_matrix(b: PuiseuxTrunc, n: int, exact: bool = True) -> ValMatrix:
    """Node conditions at 1 and ``b`` for a degree ``n`` polynomial.

    Row ``r`` evaluated against the coefficients gives ``f(1)``, ``f'(1)``,
    ``f(b)`` and ``b f'(b)``.

    Args:
        b: Second node
        n: Degree
        exact: Treat the terms of ``b`` as its exact value, which lets the
            matrix be rebuilt at any truncation order
    """
    if n < 1:
        raise ValueError(f"Degree must be positive, got {n}")
    ring = b.ring
    powers = b.powers(n)
    trunc = b.trunc
    rows = (
        tuple(PuiseuxTrunc.constant(ring, 1, trunc) for _ in range(n + 1)),
        tuple(PuiseuxTrunc.constant(ring, i, trunc) for i in range(n + 1)),
        tuple(powers),
        tuple(power.scale(i) for i, power in enumerate(powers)),
    )
    if not exact:
        return ValMatrix(rows)
    terms = b.terms
    bound = 2 * n * max(_max_exponent(b), Fraction(0))
    return ValMatrix(
        rows,
        lambda t: severi_matrix(PuiseuxTrunc.from_terms(ring, terms, t), n),
        bound,
    )


def _exact_constant(series: PuiseuxTrunc) -> Optional[Fraction]:
    if len(series.terms) != 1 or series.terms[0][0] != 0:
        return None
    coefficient = series.terms[0][1]
    return coefficient.to_fraction() if coefficient.is_rational() else None


def esterov_removed_row(b1: PuiseuxTrunc, b2: PuiseuxTrunc) -> int:
    key = (_exact_constant(b1), _exact_constant(b2))
    return ESTEROV_REMOVED_ROW.get(key, ESTEROV_DEFAULT_ROW)


def esterov_full_matrix(b1: PuiseuxTrunc, b2: PuiseuxTrunc) -> ValMatrix:
    """The 6 x 6 node matrix of the configuration
    ``{(0,0), (1,0), (1,1), (0,1), (-1,0), (0,-1)}`` with nodes ``(1,1)`` and
    ``(b1, b2)``.
    """
    ring = b1.ring
    trunc = min(b1.trunc, b2.trunc)

    def c(value: Rational) -> PuiseuxTrunc:
        return PuiseuxTrunc.constant(ring, value, trunc)

    b1b2 = b1 * b2
    b1_sq = b1 * b1
    b2_sq = b2 * b2
    rows = (
        (c(1), c(1), c(1), c(1), c(1), c(1)),
        (c(0), c(1), c(1), c(0), c(-1), c(0)),
        (c(0), c(0), c(1), c(1), c(0), c(-1)),
        (b1b2, b1_sq * b2, b1_sq * b2_sq, b1b2 * b2, b2, b1),
        (c(0), b1_sq, b1_sq * b2, c(0), c(-1), c(0)),
        (c(0), c(0), b1b2 * b2, b2_sq, c(0), c(-1)),
    )
    return ValMatrix(rows)


def esterov_matrix(b1: PuiseuxTrunc, b2: PuiseuxTrunc, exact: bool = True) -> ValMatrix:
    """The full-rank ``5 x 6`` fixture for a second node ``(b1, b2) != (1, 1)``.

    The dropped row follows a fixed table: the fifth row for
    ``(-1, 1)`` and ``(-1, -1)``, the sixth for ``(1, -1)``, the fourth
    otherwise.

    Args:
        b1: First coordinate of the second node
        b2: Second coordinate of the second node
        exact: Treat the terms of ``b1`` and ``b2`` as exact values
    """
    if _exact_constant(b1) == 1 and _exact_constant(b2) == 1:
        raise ValueError("Second node must differ from (1, 1)")
    if b1.ring != b2.ring:
        raise ValueError("Node coordinates must share one coefficient ring")
    removed = esterov_removed_row(b1, b2)
    full = esterov_full_matrix(b1, b2)
    if not exact:
        return ValMatrix.from_series(full.rows).drop_row(removed)
    ring = b1.ring
    terms1, terms2 = b1.terms, b2.terms
    bound = 5 * (max(_max_exponent(b1), Fraction(0)) + max(_max_exponent(b2), Fraction(0)))

    def build(trunc: Fraction) -> ValMatrix:
        return esterov_matrix(
            PuiseuxTrunc.from_terms(ring, terms1, trunc),
            PuiseuxTrunc.from_terms(ring, terms2, trunc),
        )

    return ValMatrix(
        full.drop_row(removed).rows,
        build,
        bound,
    )


def esterov_minor_closed_forms(b1: PuiseuxTrunc) -> Tuple[PuiseuxTrunc, ...]:
    """Closed forms of ``det`` of the fixture minus column ``i`` on ``b2 = 1/b1``.

    Returns the six values for removed columns ``0..5`` in order.
    """
    minus = b1 - 1
    plus = b1 + 1
    inverse = b1.inverse()
    first = minus * minus * plus * plus * inverse * inverse
    fourth = -(minus * minus * plus * inverse)
    second = -(minus * minus * plus * inverse * inverse)
    return (first, second, -first, fourth, fourth, -second)


# Weight patterns of the three regimes on the curve b2 = 1/b1.
ESTEROV_REGIMES = {
    "positive": (0, 0, 0, 1, 1, 0),
    "negative": (0, 1, 0, 0, 0, 1),
    "hidden-tie": (1, 0, 1, 0, 0, 0),
}
