"""Forward sampling of polynomials with two double roots.

A sample fixes the nodes ``1`` and ``b``, the simple roots and the leading
coefficient, expands ``lead * (x - 1)^2 (x - b)^2 prod (x - a_i)`` over
truncated series and reads off the valuation vector of the coefficients.
Every such vector must be accepted by the classifier; its Newton diagram
must reflect the root valuations and its residual polynomials the leading
coefficients of the roots.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ..errors import PrecisionExhausted, TropSevError, ZeroUpToTruncation
from .arith import CoeffRing, RingElem
from .classifier import REASON_EXCEPTIONAL, REASON_LENGTH_THREE, classify
from .minors import EXCEPTIONAL_BASES
from .newton import WeightVector, newton_diagram, residual_polynomial, valuation_profile
from .precision import PrecisionPolicy, initial_trunc, with_precision
from .puiseux import PuiseuxTrunc

logger = logging.getLogger(__name__)

Term = Tuple[Fraction, RingElem]
Terms = Tuple[Term, ...]

MIN_SAMPLE_N = 4
MAX_SAMPLE_N = 10

# Orders of the roots of unity allowed in leading coefficients.
COEFFICIENT_ORDERS = (1, 2, 3, 4, 6)
MAX_DENOMINATOR = 4

EXCEPTIONAL_REASONS = (REASON_EXCEPTIONAL, REASON_LENGTH_THREE)

MODE_GENERIC = "generic"
MODE_DISTINCT_NODES = "distinct-nodes"
MODE_HIDDEN_TIE = "hidden-tie"
SAMPLE_MODES = (MODE_GENERIC, MODE_DISTINCT_NODES, MODE_HIDDEN_TIE)


def _terms_order(terms: Terms) -> Fraction:
    return min(e for e, _ in terms)


def _leading_term(terms: Terms) -> Term:
    return min(terms, key=lambda term: term[0])


@dataclass(frozen=True)
class RootSample:
    """Roots and leading coefficient of a forward sample, all given exactly.

    Each root is a Puiseux polynomial listed as ``(exponent, coefficient)``
    terms, so the sample can be expanded at any truncation order.
    """

    ring: CoeffRing
    node_b: Terms
    simple_roots: Tuple[Terms, ...]
    lead: Terms
    mode: str = MODE_GENERIC

    def __post_init__(self) -> None:
        for terms in (self.node_b, self.lead) + self.simple_roots:
            if not terms or any(c.is_zero() for _, c in terms):
                raise ValueError("Roots and leading coefficient must be nonzero")
        if self.node_b == ((Fraction(0), self.ring.one()),):
            raise ValueError("Second node must differ from 1")

    @property
    def n(self) -> int:
        return 4 + len(self.simple_roots)

    def series(self, trunc: Fraction) -> Tuple[PuiseuxTrunc, List[PuiseuxTrunc], PuiseuxTrunc]:
        def build(terms: Terms) -> PuiseuxTrunc:
            return PuiseuxTrunc.from_terms(self.ring, terms, trunc)

        return build(self.node_b), [build(a) for a in self.simple_roots], build(self.lead)

    def roots(self) -> List[Terms]:
        one = ((Fraction(0), self.ring.one()),)
        return [one, one, self.node_b, self.node_b, *self.simple_roots]

    def root_valuations(self) -> List[Fraction]:
        return [_terms_order(root) for root in self.roots()]

    def leading_roots(self) -> List[Term]:
        return [_leading_term(root) for root in self.roots()]

    def largest_exponent(self) -> Fraction:
        """Sum of the largest absolute exponents of every factor."""
        total = Fraction(0)
        for terms in self.roots() + [self.lead]:
            total += max(abs(e) for e, _ in terms)
        return total

    def describe(self) -> Dict[str, object]:
        def text(terms: Terms) -> str:
            return " + ".join(f"({c})*t^({e})" for e, c in sorted(terms, key=lambda t: t[0]))

        return {
            "mode": self.mode,
            "ring": self.ring.describe(),
            "b": text(self.node_b),
            "simple_roots": [text(a) for a in self.simple_roots],
            "lead": text(self.lead),
        }


@dataclass(frozen=True)
class ForwardSample:
    sample: RootSample
    coefficients: Tuple[PuiseuxTrunc, ...]
    weight: WeightVector
    trunc: Fraction


def _expand(
    node_b: PuiseuxTrunc, simple_roots: Sequence[PuiseuxTrunc], lead: PuiseuxTrunc
) -> List[PuiseuxTrunc]:
    ring = lead.ring
    one = PuiseuxTrunc.constant(ring, 1, lead.trunc)
    coefficients = [lead]
    for root in [one, one, node_b, node_b, *simple_roots]:
        # multiply by (x - root)
        product = [PuiseuxTrunc.zero(ring, lead.trunc)] + coefficients
        for i, coefficient in enumerate(coefficients):
            product[i] = product[i] - root * coefficient
        coefficients = product
    return coefficients


def forward_map(
    node_b: PuiseuxTrunc,
    simple_roots: Sequence[PuiseuxTrunc],
    lead: PuiseuxTrunc,
) -> Tuple[List[PuiseuxTrunc], WeightVector]:
    """Expand ``lead * (x - 1)^2 (x - b)^2 prod (x - a_i)``.

    Args:
        node_b: Second node, different from 1
        simple_roots: Nonzero simple roots, at least ``n - 4`` of them for
            degree ``n``
        lead: Leading coefficient

    Returns:
        Tuple of (coefficients ``c_0..c_n``, their valuation vector)

    Raises:
        ValueError: If a root is zero or ``b`` equals 1
        PrecisionExhausted: If some coefficient vanishes up to truncation
    """
    if (node_b - 1).is_zero_to_precision():
        raise ValueError("Second node must differ from 1")
    for root in [node_b, *simple_roots, lead]:
        if root.is_zero_to_precision():
            raise ValueError("Roots and leading coefficient must be nonzero")
    coefficients = _expand(node_b, simple_roots, lead)
    try:
        weight = WeightVector(tuple(c.valuation() for c in coefficients))
    except ZeroUpToTruncation as e:
        raise PrecisionExhausted(
            f"Coefficient valuation ambiguous with fixed input series: {e}"
        ) from e
    return coefficients, weight


def forward_sample(
    sample: RootSample, policy: Optional[PrecisionPolicy] = None
) -> ForwardSample:
    """Expand a sample, raising the truncation order until every valuation is
    certified.

    Raises:
        PrecisionExhausted: If a coefficient stays zero up to truncation,
            which happens for exact cancellations
    """

    def attempt(trunc: Fraction) -> ForwardSample:
        b, simple, lead = sample.series(trunc)
        coefficients = _expand(b, simple, lead)
        weight = WeightVector(tuple(c.valuation() for c in coefficients))
        return ForwardSample(sample, tuple(coefficients), weight, trunc)

    return with_precision(
        attempt, initial_trunc(sample.largest_exponent()), policy, "forward sample"
    )


def check_profile(forward: ForwardSample) -> bool:
    """The Newton diagram has one cell of length ``l`` and slope ``-v`` per
    ``l`` roots of valuation ``v``."""
    profile = []
    for valuation, length in valuation_profile(newton_diagram(forward.weight)):
        profile.extend([valuation] * length)
    return sorted(profile) == sorted(forward.sample.root_valuations())


def check_residuals(forward: ForwardSample) -> bool:
    """Each residual polynomial vanishes at the leading coefficients of the
    roots of the matching valuation, with the expected multiplicities."""
    leading = forward.sample.leading_roots()
    for cell in newton_diagram(forward.weight):
        valuation = -cell.slope
        expected = Counter(c for v, c in leading if v == valuation)
        if sum(expected.values()) != cell.lattice_length:
            return False
        residual = residual_polynomial(forward.coefficients, cell, forward.weight)
        for root, multiplicity in expected.items():
            if residual.root_multiplicity(root) != multiplicity:
                return False
    return True


# ---------------------------------------------------------------------------
# Random samples
# ---------------------------------------------------------------------------


def _random_valuation(rng: random.Random) -> Fraction:
    q = rng.randint(1, MAX_DENOMINATOR)
    return Fraction(rng.randint(-2 * q, 2 * q), q)


def _ring_for(order: int) -> CoeffRing:
    return CoeffRing.rationals() if order <= 2 else CoeffRing.cyclotomic(order)


def _random_unit(ring: CoeffRing, order: int, rng: random.Random) -> RingElem:
    scale = rng.choice((1, 2, 3, -1, -2, -3))
    if order <= 2:
        return ring.element(scale)
    return ring.gen() ** rng.randrange(order) * scale


def _random_root(
    ring: CoeffRing, order: int, rng: random.Random, valuation: Optional[Fraction] = None
) -> Terms:
    v = _random_valuation(rng) if valuation is None else valuation
    terms = [(v, _random_unit(ring, order, rng))]
    if rng.random() < 0.5:
        step = Fraction(rng.randint(1, MAX_DENOMINATOR), rng.randint(1, 2))
        terms.append((v + step, _random_unit(ring, order, rng)))
    return tuple(terms)


def _distinct_nonzero_valuations(count: int, rng: random.Random) -> List[Fraction]:
    values: List[Fraction] = []
    while len(values) < count:
        v = _random_valuation(rng)
        if v != 0 and v not in values:
            values.append(v)
    return values


def random_root_sample(n: int, rng: random.Random, mode: str = MODE_GENERIC) -> RootSample:
    """Draw a sample from a fixed distribution.

    Valuations are rationals with denominators at most 4; leading
    coefficients are small integers times roots of unity of order 1, 2, 3, 4
    or 6. ``distinct-nodes`` forces ``val(b) != 0``; ``hidden-tie`` uses
    ``b = -1 + c t^e`` and simple roots of pairwise distinct nonzero
    valuations, so the nodes share the only marked cell.
    """
    if mode not in SAMPLE_MODES:
        raise ValueError(f"Unknown sample mode {mode!r}")
    if mode == MODE_HIDDEN_TIE:
        order = 2
        ring = _ring_for(order)
        step = Fraction(rng.randint(1, MAX_DENOMINATOR), rng.randint(1, 2))
        node_b: Terms = ((Fraction(0), ring.element(-1)), (step, _random_unit(ring, order, rng)))
        simple = tuple(
            ((v, _random_unit(ring, order, rng)),)
            for v in _distinct_nonzero_valuations(n - 4, rng)
        )
    else:
        order = rng.choice(COEFFICIENT_ORDERS)
        ring = _ring_for(order)
        valuation = None
        if mode == MODE_DISTINCT_NODES:
            valuation = _distinct_nonzero_valuations(1, rng)[0]
        elif rng.random() < 0.5:
            valuation = Fraction(0)
        node_b = _random_root(ring, order, rng, valuation)
        if node_b == ((Fraction(0), ring.one()),):
            node_b = node_b + ((Fraction(rng.randint(1, 3)), ring.one()),)
        simple = tuple(_random_root(ring, order, rng) for _ in range(n - 4))
    lead = ((_random_valuation(rng), _random_unit(ring, order, rng)),)
    return RootSample(ring, node_b, simple, lead, mode)


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------


@dataclass
class CrossValidationReport:
    """Outcome of a forward-sampling run.

    ``kinds`` records the certificate kinds found per accepted sample, e.g.
    ``"I"`` or ``"II+III"``. Samples with an exact cancellation in some
    coefficient are counted as degenerate and skipped.
    """

    n: int
    seed: int
    samples: int
    failures: List[Dict[str, object]] = field(default_factory=list)
    degenerate: int = 0
    kinds: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def histogram(self) -> pd.Series:
        return pd.Series(self.kinds, dtype=object).value_counts()

    def as_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "seed": self.seed,
            "samples": self.samples,
            "degenerate": self.degenerate,
            "failures": self.failures,
            "histogram": {str(k): int(v) for k, v in self.histogram().items()},
        }


def _kind_label(kinds: Sequence[str]) -> str:
    return "+".join(sorted(set(kinds)))


def cross_validate(
    n: int,
    sample_count: int,
    seed: int,
    modes: Sequence[str] = SAMPLE_MODES,
    policy: Optional[PrecisionPolicy] = None,
) -> CrossValidationReport:
    """Classify forward samples and check their diagrams.

    Args:
        n: Degree, between 4 and 10
        sample_count: Number of samples
        seed: Seed of the sample stream
        modes: Sample modes, used in rotation
        policy: Precision policy for the expansions

    Returns:
        CrossValidationReport; failures never raise
    """
    if not MIN_SAMPLE_N <= n <= MAX_SAMPLE_N:
        raise ValueError(f"n must be between {MIN_SAMPLE_N} and {MAX_SAMPLE_N}, got {n}")
    rng = random.Random(seed)
    report = CrossValidationReport(n, seed, sample_count)
    for index in range(sample_count):
        sample = random_root_sample(n, rng, modes[index % len(modes)])
        try:
            forward = forward_sample(sample, policy)
        except PrecisionExhausted:
            report.degenerate += 1
            continue

        problems = []
        if not check_profile(forward):
            problems.append("valuation profile")
        try:
            if not check_residuals(forward):
                problems.append("residual roots")
        except TropSevError as e:
            problems.append(f"residual roots: {e}")
        result = classify(forward.weight)
        if not result.member:
            problems.append(f"not a member: {result.refusal_reason}")
        else:
            report.kinds.append(_kind_label([c.kind for c in result.certificates]))

        if problems:
            logger.warning(
                "Sample %d (n=%d, seed=%d) failed: %s", index, n, seed, "; ".join(problems)
            )
            report.failures.append(
                {
                    "index": index,
                    "weight": [str(v) for v in forward.weight],
                    "problems": problems,
                    "sample": sample.describe(),
                }
            )
    logger.info(
        "Cross-validation n=%d seed=%d: %d samples, %d degenerate, %d failures",
        n,
        seed,
        sample_count,
        report.degenerate,
        len(report.failures),
    )
    return report


# ---------------------------------------------------------------------------
# Exceptional configurations
# ---------------------------------------------------------------------------


def canonical_form(w: WeightVector) -> Tuple[Fraction, ...]:
    """Representative modulo adding ``a + b * i``: ``w_0 = w_n = 0``."""
    n = w.n
    first, last = w[0], w[n]
    return tuple(wi - first - (last - first) * i / n for i, wi in enumerate(w))


def exceptional_weight(support: Sequence[int], n: int) -> WeightVector:
    """Weight whose only marked cell has exactly the given support.

    Points of the support sit at height 0, the other points of its segment
    at height 1, and points outside rise quadratically.
    """
    left, right = min(support), max(support)
    if left < 0 or right > n:
        raise ValueError(f"Support {tuple(support)} does not fit in 0..{n}")
    weights = []
    for i in range(n + 1):
        if i < left:
            weights.append((left - i) ** 2)
        elif i > right:
            weights.append((i - right) ** 2)
        else:
            weights.append(0 if i in support else 1)
    return WeightVector.of(weights)


def exceptional_targets(n: int) -> List[Tuple[Tuple[int, ...], WeightVector]]:
    """Every pure translate of an exceptional configuration inside 0..n."""
    targets = []
    for base in EXCEPTIONAL_BASES:
        for shift in range(n - base[-1] + 1):
            support = tuple(i + shift for i in base)
            targets.append((support, exceptional_weight(support, n)))
    return targets


@dataclass
class SmokeReport:
    """Outcome of ``exceptional_smoke``. Not a proof of anything."""

    n: int
    seed: int
    budget: int
    targets: List[Tuple[int, ...]]
    unrefused: List[Tuple[int, ...]] = field(default_factory=list)
    hits: List[Dict[str, object]] = field(default_factory=list)
    degenerate: int = 0

    @property
    def ok(self) -> bool:
        return not self.hits and not self.unrefused


def exceptional_smoke(
    n: int, budget: int, seed: int, policy: Optional[PrecisionPolicy] = None
) -> SmokeReport:
    """Check that no forward sample lands on an exceptional single-cell weight.

    Each target must also be refused by the classifier, as an exceptional
    translate or as a lone marked cell of lattice length 3.
    """
    if not MIN_SAMPLE_N <= n <= MAX_SAMPLE_N:
        raise ValueError(f"n must be between {MIN_SAMPLE_N} and {MAX_SAMPLE_N}, got {n}")
    targets = exceptional_targets(n)
    report = SmokeReport(n, seed, budget, [support for support, _ in targets])
    for support, weight in targets:
        result = classify(weight)
        if result.member or result.refusal_reason not in EXCEPTIONAL_REASONS:
            report.unrefused.append(support)

    forms = {canonical_form(weight): support for support, weight in targets}
    rng = random.Random(seed)
    for index in range(budget):
        sample = random_root_sample(n, rng, SAMPLE_MODES[index % len(SAMPLE_MODES)])
        try:
            forward = forward_sample(sample, policy)
        except PrecisionExhausted:
            report.degenerate += 1
            continue
        support = forms.get(canonical_form(forward.weight))
        if support is not None:
            logger.warning("Sample %d (seed=%d) hit exceptional support %s", index, seed, support)
            report.hits.append({"index": index, "support": support, "sample": sample.describe()})
    return report
