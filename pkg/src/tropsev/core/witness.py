"""Witness polynomials with two nodes realizing a weight vector.

Every construction works in normalized coordinates: one cell of the Newton
diagram is made horizontal at height zero, the polynomial gets its nodes at
``1`` and ``b``, the coefficients off a four-element set ``J`` are the
monomials ``t^{w_i}``, and the four remaining coefficients solve the node
conditions ``M_J(b) c_J = -sum_{i not in J} t^{w_i} M_i(b)`` by Cramer's rule.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from ..errors import (
    ExceptionalTranslation,
    InvariantViolation,
    NonGenericWeight,
    TropSevError,
    ZeroUpToTruncation,
)
from .arith import CoeffRing, explore_branches, root_multiplicity
from .classifier import (
    ConeCertificate,
    TypeI,
    TypeII,
    TypeIII,
    classify,
    cone_h_description,
    noncongruent,
)
from .minors import (
    check_vanishing_pattern,
    good_second_indices,
    index_set,
    minor_poly,
    power_pattern,
    repeated_at_most_once,
    squarefree_nontrivial_part,
)
from .newton import AffineTransform, WeightVector, newton_diagram, normalize
from .precision import PrecisionPolicy, with_precision
from .puiseux import PuiseuxTrunc, intpoly_with_powers

logger = logging.getLogger(__name__)

H_SEARCH_LIMIT = 10

KIND_I = "I"
KIND_II = "II"
KIND_II_EXCEPTIONAL = "II-exceptional"
KIND_III = "III"


@dataclass(frozen=True)
class Witness:
    """A polynomial with nodes 1 and ``b`` in normalized coordinates.

    Attributes:
        kind: Construction used (``I``, ``II``, ``II-exceptional``, ``III``)
        ring: Coefficient ring of every series
        b: Second node
        coefficients: ``c_0, ..., c_n`` with valuations ``transform.apply(weight)``
        transform: Normalization applied to ``weight``
        weight: The original weight vector
        certificate: Cone certificate the construction followed
        J: Indices whose coefficients were solved for
        details: Construction parameters (exponents, chosen indices, ...)
    """

    kind: str
    ring: CoeffRing
    b: PuiseuxTrunc
    coefficients: Tuple[PuiseuxTrunc, ...]
    transform: AffineTransform
    weight: WeightVector
    certificate: ConeCertificate
    J: Tuple[int, ...]
    details: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def n(self) -> int:
        return len(self.coefficients) - 1

    @property
    def normalized_weight(self) -> WeightVector:
        return self.transform.apply(self.weight)

    def original_coefficients(self) -> List[PuiseuxTrunc]:
        """Coefficients of ``t^{-shift} g(t^{-alpha} x)`` for the normalized ``g``."""
        alpha, shift = self.transform.alpha, self.transform.shift
        return [c.shift(-alpha * i - shift) for i, c in enumerate(self.coefficients)]

    def original_nodes(self) -> Tuple[PuiseuxTrunc, PuiseuxTrunc]:
        """The two nodes ``t^alpha`` and ``t^alpha * b`` in original coordinates."""
        alpha = self.transform.alpha
        first = PuiseuxTrunc.monomial(self.ring, 1, alpha, self.b.trunc + alpha)
        return first, self.b.shift(alpha)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, passed, detail))


class _RejectedBranch(Exception):
    """The candidate beta of a dynamic-ring branch has three equal powers."""


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _sort_sign(columns: Sequence[int]) -> int:
    inversions = sum(
        1 for a in range(len(columns)) for b in range(a + 1, len(columns)) if columns[a] > columns[b]
    )
    return -1 if inversions % 2 else 1


def _cell_index(w: WeightVector, points: Sequence[int]) -> int:
    for index, cell in enumerate(newton_diagram(w).cells):
        if set(points) <= set(cell.support):
            return index
    raise NonGenericWeight(f"{sorted(points)} is not contained in one cell of the Newton diagram of {w}")


def _unique_argmin(weights: WeightVector, candidates: Sequence[int], what: str) -> int:
    if not candidates:
        raise NonGenericWeight(f"No candidate for {what}")
    minimum = min(weights[i] for i in candidates)
    minimizers = [i for i in candidates if weights[i] == minimum]
    if len(minimizers) > 1:
        raise NonGenericWeight(f"{what} is not unique: minimum {minimum} attained at {minimizers}")
    return minimizers[0]


def _initial_trunc(weights: WeightVector, tie_weight: Fraction) -> Fraction:
    return 4 * max(weights) + 4 * tie_weight + 1


def _cramer(
    weights: WeightVector,
    J: Tuple[int, ...],
    powers: List[PuiseuxTrunc],
    minor_inverse: PuiseuxTrunc,
    groups: List[List[int]],
) -> List[List[PuiseuxTrunc]]:
    """Solve for ``c_J`` with the right-hand side split into ``groups``.

    Returns one solution vector (ordered as J) per group of off-J indices.
    """
    ring = powers[0].ring
    solutions = []
    for group in groups:
        vector = []
        for position in range(4):
            total: Optional[PuiseuxTrunc] = None
            for i in group:
                columns = list(J)
                columns[position] = i
                minor = intpoly_with_powers(minor_poly(columns).poly, powers)
                term = minor.shift(weights[i]).scale(-_sort_sign(columns))
                total = term if total is None else total + term
            if total is None:
                total = PuiseuxTrunc.zero(ring, minor_inverse.trunc + minor_inverse._order())
            vector.append(total * minor_inverse)
        solutions.append(vector)
    return solutions


def _assemble(
    weights: WeightVector,
    J: Tuple[int, ...],
    solved: List[PuiseuxTrunc],
    trunc: Fraction,
    ring: CoeffRing,
) -> Tuple[PuiseuxTrunc, ...]:
    coefficients: List[PuiseuxTrunc] = []
    for i in range(weights.n + 1):
        if i in J:
            coefficients.append(solved[J.index(i)])
        else:
            coefficients.append(PuiseuxTrunc.monomial(ring, 1, weights[i], trunc))
    return tuple(coefficients)


def _check_solved_valuations(
    weights: WeightVector, J: Tuple[int, ...], solved: Sequence[PuiseuxTrunc]
) -> None:
    for index, coefficient in zip(J, solved):
        valuation = coefficient.valuation()
        if valuation != weights[index]:
            raise InvariantViolation(
                f"Solved coefficient c_{index} has valuation {valuation}, expected {weights[index]}"
            )


def _solve(
    weights: WeightVector,
    J: Tuple[int, ...],
    b: PuiseuxTrunc,
    expected_minor_valuation: Fraction,
    groups: Optional[List[List[int]]] = None,
) -> Tuple[PuiseuxTrunc, ...]:
    n = weights.n
    powers = b.powers(2 * n)
    minor = intpoly_with_powers(minor_poly(J).poly, powers)
    valuation = minor.valuation()
    if valuation != expected_minor_valuation:
        raise InvariantViolation(
            f"val D_{J}(b) = {valuation}, expected {expected_minor_valuation}"
        )
    off = [i for i in range(n + 1) if i not in J]
    groups = groups or [off]
    parts = _cramer(weights, J, powers, minor.inverse(), groups)
    solved = parts[0]
    for part in parts[1:]:
        solved = [a + c for a, c in zip(solved, part)]
    if len(parts) > 1:
        for group, part in zip(groups, parts):
            logger.debug(
                "Right-hand side %s contributes valuations %s",
                group,
                [_safe_valuation(c) for c in part],
            )
    _check_solved_valuations(weights, J, solved)
    return _assemble(weights, J, solved, b.trunc, b.ring)


# ---------------------------------------------------------------------------
# Type I
# ---------------------------------------------------------------------------


def witness_type_I(
    w: WeightVector, cert: TypeI, policy: Optional[PrecisionPolicy] = None
) -> Witness:
    """Two marked segments: nodes ``1`` and ``t^v`` over the rationals.

    The right segment is made horizontal; the left one then has slope
    ``-v``. Solved coefficients have the leading terms forced by the two
    residual polynomials.

    Raises:
        NonGenericWeight: If w is not interior to the certificate's cone
    """
    if not cone_h_description(cert, w.n).strictly_contains(w.entries):
        raise NonGenericWeight(f"{w} is not interior to the type I cone {cert.cell_a}, {cert.cell_b}")
    (i1, j1, k1), (i2, j2, k2) = cert.cell_a, cert.cell_b
    weights, transform = normalize(w, _cell_index(w, cert.cell_b))
    v = -newton_diagram(weights).cells[_cell_index(weights, cert.cell_a)].slope
    J = (i1, j1, j2, k2)
    ring = CoeffRing.rationals()
    expected_leading = {
        i1: Fraction(-(j1 - k1), j1 - i1),
        j1: Fraction(-(k1 - i1), j1 - i1),
        j2: Fraction(-(k2 - i2), k2 - j2),
        k2: Fraction(-(i2 - j2), k2 - j2),
    }

    def attempt(trunc: Fraction) -> Tuple[PuiseuxTrunc, Tuple[PuiseuxTrunc, ...]]:
        b = PuiseuxTrunc.monomial(ring, 1, v, trunc)
        coefficients = _solve(weights, J, b, v * (i1 + j1))
        return b, coefficients

    b, coefficients = with_precision(
        attempt, _initial_trunc(weights, v * w.n), policy, what="type I witness"
    )
    for index, value in expected_leading.items():
        leading = coefficients[index].leading_coefficient().to_fraction()
        if leading != value:
            raise InvariantViolation(
                f"Leading coefficient of c_{index} is {leading}, expected {value}"
            )
    logger.info("Built type I witness for %s with b = t^%s", w, v)
    return Witness(KIND_I, ring, b, coefficients, transform, w, cert, J, {"v": v})


# ---------------------------------------------------------------------------
# Type II
# ---------------------------------------------------------------------------


def _type_ii_general(
    w: WeightVector,
    weights: WeightVector,
    transform: AffineTransform,
    cert: TypeII,
    policy: Optional[PrecisionPolicy],
) -> Witness:
    J = cert.cell
    n = w.n
    poly = minor_poly(J).poly
    candidates = squarefree_nontrivial_part(J)
    if candidates.degree() < 1:
        raise InvariantViolation(f"D_{J} has no root with powers repeated at most once")

    def in_branch(ring: CoeffRing) -> Witness:
        beta = ring.gen()
        if not repeated_at_most_once(J, beta):
            raise _RejectedBranch(f"powers of beta on {J}: {power_pattern(J, beta)}")
        logger.debug("Using beta in %r with power pattern %s", ring, power_pattern(J, beta))
        m = root_multiplicity(poly, beta)
        if m > 2:
            raise InvariantViolation(f"beta is a root of D_{J} of multiplicity {m}")
        S = good_second_indices(J, beta, range(n + 1))
        if not S:
            raise InvariantViolation(f"No index i off {J} with D_(J+i)-i1 invertible at beta")
        i5 = _unique_argmin(weights, S, "second monomial i5")
        logger.debug("S = %s, i5 = %d, multiplicity m = %d", S, i5, m)
        report = check_vanishing_pattern(J + (i5,), beta)
        if any(report.vanishing[:4]):
            raise InvariantViolation(
                f"Minors containing i5={i5} vanish at beta: {report.vanishing_subsets()}"
            )
        target = weights[i5]
        v = target / m

        def attempt(trunc: Fraction) -> Tuple[PuiseuxTrunc, Tuple[PuiseuxTrunc, ...], int]:
            for h in range(1, H_SEARCH_LIMIT + 1):
                b = PuiseuxTrunc.from_terms(ring, [(0, beta), (v, h)], trunc)
                value = intpoly_with_powers(poly, b.powers(poly.degree()))
                try:
                    valuation = value.valuation()
                except ZeroUpToTruncation:
                    logger.debug("h=%d: D_J(b) zero up to O(t^%s)", h, trunc)
                    continue
                if valuation != target:
                    logger.debug("h=%d: val D_J(b) = %s, want %s", h, valuation, target)
                    continue
                return b, _solve(weights, J, b, target), h
            raise ZeroUpToTruncation(f"No h in 1..{H_SEARCH_LIMIT} gives val D_J(b) = {target}")

        b, coefficients, h = with_precision(
            attempt, _initial_trunc(weights, target), policy, what="type II witness"
        )
        details = {"beta_modulus": ring.describe()["modulus"], "m": m, "i5": i5, "h": h, "v": v, "S": S}
        return Witness(KIND_II, ring, b, coefficients, transform, w, cert, J, details)

    try:
        witness = explore_branches(
            candidates, in_branch, accept=lambda e: isinstance(e, _RejectedBranch)
        )
    except _RejectedBranch as e:
        raise InvariantViolation(f"Every root of D_{J} was rejected: {e}") from e
    logger.info("Built type II witness for %s over %r", w, witness.ring)
    return witness


def _type_ii_exceptional(
    w: WeightVector,
    weights: WeightVector,
    transform: AffineTransform,
    cert: TypeII,
    policy: Optional[PrecisionPolicy],
) -> Witness:
    J = cert.cell
    s = cert.exceptional.s
    i1 = J[0]
    ring = CoeffRing.cyclotomic(s)
    beta = ring.gen()
    candidates = [i for i in range(w.n + 1) if i not in J and (i - i1) % s]
    i5 = _unique_argmin(weights, candidates, "non-congruent minimizer i5")
    v = weights[i5] / 3

    def attempt(trunc: Fraction) -> Tuple[PuiseuxTrunc, Tuple[PuiseuxTrunc, ...]]:
        b = PuiseuxTrunc.from_terms(ring, [(0, beta), (v, 1)], trunc)
        return b, _solve(weights, J, b, 4 * v)

    b, coefficients = with_precision(
        attempt, _initial_trunc(weights, weights[i5]), policy, what="type II exceptional witness"
    )
    logger.info("Built affine-exceptional type II witness for %s (s=%d)", w, s)
    details = {"s": s, "i5": i5, "v": v}
    return Witness(KIND_II_EXCEPTIONAL, ring, b, coefficients, transform, w, cert, J, details)


def witness_type_II(
    w: WeightVector, cert: TypeII, policy: Optional[PrecisionPolicy] = None
) -> Witness:
    """One marked segment with two marks.

    Scaled images (``s > 1``) of exceptional configurations take beta a
    primitive s-th root of unity; every other cell takes beta a root of
    ``D_J`` found by dynamic evaluation.

    Raises:
        ExceptionalTranslation: If the cell is a translation of an
            exceptional configuration
        NonGenericWeight: If w is not interior or the minimizer i5 is tied
    """
    image = cert.exceptional
    if image is not None and image.s == 1:
        raise ExceptionalTranslation(f"{cert.cell} is a translation of {image.base}")
    if not cone_h_description(cert, w.n).strictly_contains(w.entries):
        raise NonGenericWeight(f"{w} is not interior to the type II cone of {cert.cell}")
    weights, transform = normalize(w, _cell_index(w, cert.cell))
    if image is not None:
        return _type_ii_exceptional(w, weights, transform, cert, policy)
    return _type_ii_general(w, weights, transform, cert, policy)


# ---------------------------------------------------------------------------
# Type III
# ---------------------------------------------------------------------------


def witness_type_III(
    w: WeightVector, cert: TypeIII, policy: Optional[PrecisionPolicy] = None
) -> Witness:
    """Marked triple with a hidden tie: ``b = beta + t^{w_i4}``.

    Raises:
        NonGenericWeight: If the tie is not strict or the congruent
            minimizer below the tie is not unique
    """
    if not cone_h_description(cert, w.n).contains(w.entries):
        raise NonGenericWeight(f"{w} is not in the type III cone of {cert.sigma}")
    sigma, d = cert.sigma, cert.d
    i1 = sigma[0]
    weights, transform = normalize(w, _cell_index(w, sigma))
    i4 = cert.tie[0]
    tie_weight = weights[i4]
    candidates = noncongruent(sigma, d, w.n)
    above = [j for j in candidates if j not in cert.tie and weights[j] <= tie_weight]
    if above or any(weights[j] <= 0 for j in range(w.n + 1) if j not in sigma):
        raise NonGenericWeight(f"{w} is not interior to the type III cone of {sigma}, tie {cert.tie}")
    congruent = [
        s for s in range(w.n + 1)
        if s not in sigma and (s - i1) % d == 0 and 0 < weights[s] <= tie_weight
    ]
    s0 = _unique_argmin(weights, congruent, "congruent minimizer s0") if congruent else None
    J = index_set(sigma + (i4,))
    off = [i for i in range(w.n + 1) if i not in J]
    groups = [congruent, [i for i in off if i not in congruent]] if congruent else [off]
    ring = CoeffRing.cyclotomic(d)
    beta = ring.gen()

    def attempt(trunc: Fraction) -> Tuple[PuiseuxTrunc, Tuple[PuiseuxTrunc, ...]]:
        b = PuiseuxTrunc.from_terms(ring, [(0, beta), (tie_weight, 1)], trunc)
        coefficients = _solve(weights, J, b, tie_weight, groups)
        return b, coefficients

    b, coefficients = with_precision(
        attempt, _initial_trunc(weights, tie_weight), policy, what="type III witness"
    )
    logger.info("Built type III witness for %s (d=%d, tie %s)", w, d, cert.tie)
    details = {"d": d, "i4": i4, "s0": s0, "v": tie_weight}
    return Witness(KIND_III, ring, b, coefficients, transform, w, cert, J, details)


def _safe_valuation(series: PuiseuxTrunc) -> Optional[Fraction]:
    try:
        return series.valuation()
    except ZeroUpToTruncation:
        return None


# ---------------------------------------------------------------------------
# Dispatch and verification
# ---------------------------------------------------------------------------

_BUILDERS: Dict[str, Callable[..., Witness]] = {
    "I": witness_type_I,
    "II": witness_type_II,
    "III": witness_type_III,
}


def build_witness(
    w: WeightVector,
    cert: Optional[ConeCertificate] = None,
    policy: Optional[PrecisionPolicy] = None,
) -> Witness:
    """Construct a witness for ``w``, classifying it first when no certificate is given.

    Raises:
        NonGenericWeight: If w has no interior certificate
    """
    if cert is None:
        result = classify(w)
        interior = result.interior_certificates()
        if not interior:
            reason = result.refusal_reason or "only boundary certificates"
            raise NonGenericWeight(f"No interior certificate for {w}: {reason}")
        cert = interior[0]
    return _BUILDERS[cert.kind](w, cert, policy)


def _derivative_at(coefficients: Sequence[PuiseuxTrunc], powers: List[PuiseuxTrunc]) -> PuiseuxTrunc:
    total = None
    for i, c in enumerate(coefficients):
        if i == 0:
            continue
        term = (c * powers[i - 1]).scale(i)
        total = term if total is None else total + term
    return total


def _sum(series: Sequence[PuiseuxTrunc]) -> PuiseuxTrunc:
    total = series[0]
    for term in series[1:]:
        total = total + term
    return total


def _value_at(coefficients: Sequence[PuiseuxTrunc], powers: List[PuiseuxTrunc]) -> PuiseuxTrunc:
    total = coefficients[0] * powers[0]
    for c, power in zip(coefficients[1:], powers[1:]):
        total = total + c * power
    return total


def _vanishing_check(
    report: VerificationReport, name: str, compute: Callable[[], PuiseuxTrunc], strict: bool, floor: Fraction
) -> None:
    try:
        value = compute()
    except (TropSevError, ZeroDivisionError) as e:
        report.add(name, False, f"evaluation failed: {e}")
        return
    if not value.is_zero_to_precision():
        report.add(name, False, f"nonzero: {value}")
    elif strict and value.trunc <= floor:
        report.add(name, False, f"only known modulo t^{value.trunc}")
    else:
        report.add(name, True, f"O(t^{value.trunc})")


def verify_witness(w: WeightVector, witness: Witness, strict: bool = True) -> VerificationReport:
    """Check a witness; every failure is reported, nothing is raised.

    Args:
        w: Weight vector the witness should realize
        witness: Witness to check
        strict: Require the vanishing checks to be certified beyond the
            largest normalized weight

    Returns:
        VerificationReport with one entry per check
    """
    report = VerificationReport()
    weights = witness.transform.apply(w)
    coefficients = list(witness.coefficients)
    n = len(coefficients) - 1
    floor = max(weights)

    if n != w.n:
        report.add("length", False, f"{n + 1} coefficients for a vector of length {w.n + 1}")
        return report

    for label, values, expected in (
        ("valuations", coefficients, weights),
        ("original valuations", witness.original_coefficients(), w),
    ):
        bad = []
        for i, (c, wi) in enumerate(zip(values, expected)):
            try:
                valuation = c.valuation()
            except (TropSevError, ZeroDivisionError) as e:
                bad.append(f"c_{i}: {e}")
                continue
            if valuation != wi:
                bad.append(f"c_{i}: {valuation} != {wi}")
        report.add(label, not bad, "; ".join(bad))

    try:
        valuation, leading = witness.b.leading()
        distinct = valuation != 0 or (leading - 1).is_invertible()
        report.add("b != 1", distinct, f"b = {witness.b}")
    except (TropSevError, ZeroDivisionError) as e:
        report.add("b != 1", False, str(e))

    _vanishing_check(report, "f(1)", lambda: _sum(coefficients), strict, floor)
    _vanishing_check(
        report, "f'(1)", lambda: _sum([c.scale(i) for i, c in enumerate(coefficients)]), strict, floor
    )

    try:
        powers = witness.b.powers(n)
    except (TropSevError, ZeroDivisionError) as e:
        report.add("f(b)", False, str(e))
        return report
    _vanishing_check(report, "f(b)", lambda: _value_at(coefficients, powers), strict, floor)
    _vanishing_check(report, "f'(b)", lambda: _derivative_at(coefficients, powers), strict, floor)

    try:
        achieved = [c.valuation() for c in witness.original_coefficients()]
        inside = cone_h_description(witness.certificate, n).contains(achieved)
        # Closed cone containment only; the marked cells of val(c) are not compared.
        if inside:
            detail = "val(c) in the closed cone"
        else:
            detail = f"val(c) = {achieved} outside the cone"
        report.add("certificate", inside, detail)
    except (ValueError, ZeroDivisionError, IndexError) as e:
        report.add("certificate", False, str(e))
    return report

