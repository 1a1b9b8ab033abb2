"""Membership in the tropical Severi variety and cone certificates.

A weight vector is a member when it lies in the closure of a cone of type
I, II or III. Every cone is described by the combinatorial data that
defines it and a list of linear equalities ``a . w = 0`` and weak
inequalities ``a . w >= 0`` with integer coefficient vectors ``a``.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd
from sympy import Matrix, divisors

from ..errors import BudgetExceeded
from .minors import ExceptionalImage, is_exceptional_affine
from .newton import MarkedSubdivision, WeightVector, newton_diagram

logger = logging.getLogger(__name__)

MIN_N = 4
MAX_ENUMERATION_N = 12

Triple = Tuple[int, int, int]
Vector = Tuple[int, ...]

REASON_NO_MARKED_CELL = "no marked cell"
REASON_LENGTH_THREE = "single marked cell of lattice length 3"
REASON_EXCEPTIONAL = "translation of exceptional configuration"
REASON_TIE_ONCE = "hidden-tie minimum attained once"
REASON_NONE = "no certificate"


@dataclass(frozen=True)
class TypeI:
    """Two marked segments ``cell_a`` and ``cell_b``, each a triple (left, mark, right)."""

    cell_a: Triple
    cell_b: Triple
    interior: bool = False

    kind = "I"

    def reflected(self, n: int) -> "TypeI":
        return TypeI(_reflect_triple(self.cell_b, n), _reflect_triple(self.cell_a, n), self.interior)

    def key(self) -> tuple:
        return (self.kind, self.cell_a, self.cell_b)


@dataclass(frozen=True)
class TypeII:
    """One marked segment with four points ``cell`` and marks ``cell[1:3]``.

    ``exceptional`` is set when the cell is a scaled (``s > 1``) image of an
    exceptional configuration.
    """

    cell: Tuple[int, int, int, int]
    interior: bool = False
    exceptional: Optional[ExceptionalImage] = None

    kind = "II"

    @property
    def marks(self) -> Tuple[int, int]:
        return self.cell[1], self.cell[2]

    def reflected(self, n: int) -> "TypeII":
        cell = tuple(sorted(n - i for i in self.cell))
        return TypeII(cell, self.interior, is_exceptional_affine(cell))

    def key(self) -> tuple:
        return (self.kind, self.cell)


@dataclass(frozen=True)
class TypeIII:
    """Marked triple ``sigma`` with a hidden tie ``tie`` modulo ``d``."""

    sigma: Triple
    d: int
    tie: Tuple[int, int]
    interior: bool = False

    kind = "III"

    @property
    def g(self) -> int:
        i1, i2, i3 = self.sigma
        return gcd(i3 - i1, i2 - i1)

    def reflected(self, n: int) -> "TypeIII":
        return TypeIII(
            tuple(sorted(n - i for i in self.sigma)),
            self.d,
            tuple(sorted(n - j for j in self.tie)),
            self.interior,
        )

    def key(self) -> tuple:
        return (self.kind, self.sigma, self.d, self.tie)


ConeCertificate = Union[TypeI, TypeII, TypeIII]


@dataclass
class ClassificationResult:
    """Outcome of ``classify``: certificates for every closed cone containing w."""

    weight: WeightVector
    subdivision: MarkedSubdivision
    certificates: List[ConeCertificate] = field(default_factory=list)
    refusal_reason: Optional[str] = None

    @property
    def member(self) -> bool:
        return bool(self.certificates)

    def of_kind(self, kind: str) -> List[ConeCertificate]:
        return [c for c in self.certificates if c.kind == kind]

    def interior_certificates(self) -> List[ConeCertificate]:
        return [c for c in self.certificates if c.interior]


@dataclass(frozen=True)
class HDescription:
    equalities: Tuple[Vector, ...]
    inequalities: Tuple[Vector, ...]

    def contains(self, w: Sequence[Fraction]) -> bool:
        return all(_dot(a, w) == 0 for a in self.equalities) and all(
            _dot(a, w) >= 0 for a in self.inequalities
        )

    def strictly_contains(self, w: Sequence[Fraction]) -> bool:
        return all(_dot(a, w) == 0 for a in self.equalities) and all(
            _dot(a, w) > 0 for a in self.inequalities
        )


@dataclass(frozen=True)
class ConeDescriptor:
    certificate: ConeCertificate
    h_description: HDescription


# ---------------------------------------------------------------------------
# Linear forms
# ---------------------------------------------------------------------------


def _dot(a: Sequence[int], w: Sequence[Fraction]) -> Fraction:
    return sum((ai * wi for ai, wi in zip(a, w) if ai), Fraction(0))


def _reflect_triple(triple: Triple, n: int) -> Triple:
    return tuple(sorted(n - i for i in triple))


def height_form(i: int, k: int, j: int, n: int) -> Vector:
    """Coefficients of ``(k - i) w_j - (k - j) w_i - (j - i) w_k``.

    The form is ``(k - i)`` times the height of ``(j, w_j)`` above the line
    through ``(i, w_i)`` and ``(k, w_k)``.
    """
    vector = [0] * (n + 1)
    vector[j] += k - i
    vector[i] -= k - j
    vector[k] -= j - i
    return tuple(vector)


def _difference(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def _line_above(i: int, k: int, skip: Sequence[int], n: int) -> List[Vector]:
    return [height_form(i, k, j, n) for j in range(n + 1) if j not in skip]


def noncongruent(sigma: Triple, d: int, n: int) -> List[int]:
    return [j for j in range(n + 1) if (j - sigma[0]) % d]


def cone_h_description(cert: ConeCertificate, n: int) -> HDescription:
    """Equalities and weak inequalities defining the closed cone of ``cert``."""
    if isinstance(cert, TypeI):
        (i1, j1, k1), (i2, j2, k2) = cert.cell_a, cert.cell_b
        equalities = (height_form(i1, k1, j1, n), height_form(i2, k2, j2, n))
        inequalities = _line_above(i1, k1, cert.cell_a, n) + _line_above(i2, k2, cert.cell_b, n)
        return HDescription(equalities, tuple(inequalities))
    if isinstance(cert, TypeII):
        i1, i2, i3, i4 = cert.cell
        equalities = (height_form(i1, i4, i2, n), height_form(i1, i4, i3, n))
        return HDescription(equalities, tuple(_line_above(i1, i4, cert.cell, n)))
    if isinstance(cert, TypeIII):
        i1, i2, i3 = cert.sigma
        j1, j2 = cert.tie
        tie_form = height_form(i1, i3, j1, n)
        equalities = (
            height_form(i1, i3, i2, n),
            _difference(tie_form, height_form(i1, i3, j2, n)),
        )
        inequalities = _line_above(i1, i3, cert.sigma, n)
        inequalities += [
            _difference(height_form(i1, i3, j, n), tie_form)
            for j in noncongruent(cert.sigma, cert.d, n)
            if j not in cert.tie
        ]
        return HDescription(equalities, tuple(inequalities))
    raise TypeError(f"Unknown certificate {cert!r}")


def dimension_check(cert: ConeCertificate, n: int) -> int:
    """Dimension of the linear span of the cone, ``n + 1 - rank(equalities)``."""
    equalities = cone_h_description(cert, n).equalities
    return n + 1 - Matrix([list(row) for row in equalities]).rank()


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def _heights(w: WeightVector, i: int, k: int) -> List[Fraction]:
    n = w.n
    return [_dot(height_form(i, k, j, n), w) if j not in (i, k) else Fraction(0) for j in range(n + 1)]


def _hull_triples(subdivision: MarkedSubdivision) -> List[Triple]:
    triples = []
    for cell in subdivision.marked_cells():
        triples.extend(combinations(cell.support, 3))
    return triples


def _type_i_certificates(w: WeightVector, triples: List[Triple]) -> List[TypeI]:
    certificates = []
    for a in triples:
        for b in triples:
            if a[2] > b[0]:
                continue
            cert = TypeI(a, b)
            strict = cone_h_description(cert, w.n).strictly_contains(w.entries)
            certificates.append(TypeI(a, b, strict))
    return certificates


def _type_ii_certificates(w: WeightVector, subdivision: MarkedSubdivision) -> List[TypeII]:
    certificates = []
    for cell in subdivision.marked_cells():
        for J in combinations(cell.support, 4):
            image = is_exceptional_affine(J)
            if image is not None and image.s == 1:
                continue
            cert = TypeII(J, exceptional=image)
            strict = cone_h_description(cert, w.n).strictly_contains(w.entries)
            certificates.append(TypeII(J, strict, image))
    return certificates


def _tie_minimizers(w: WeightVector, sigma: Triple, d: int) -> Tuple[List[int], Fraction]:
    i1, _, i3 = sigma
    heights = _heights(w, i1, i3)
    candidates = noncongruent(sigma, d, w.n)
    if not candidates:
        return [], Fraction(0)
    minimum = min(heights[j] for j in candidates)
    return [j for j in candidates if heights[j] == minimum], minimum


def _type_iii_search(
    w: WeightVector, triples: List[Triple]
) -> Tuple[List[TypeIII], bool]:
    certificates = []
    tie_once = False
    for sigma in triples:
        i1, i2, i3 = sigma
        g = gcd(i3 - i1, i2 - i1)
        if g < 2:
            continue
        for d in divisors(g):
            if d < 2:
                continue
            minimizers, _ = _tie_minimizers(w, sigma, d)
            if len(minimizers) == 1:
                tie_once = True
            for tie in combinations(minimizers, 2):
                cert = TypeIII(sigma, d, tie)
                strict = len(minimizers) == 2 and cone_h_description(cert, w.n).strictly_contains(
                    w.entries
                )
                certificates.append(TypeIII(sigma, d, tie, strict))
    return certificates, tie_once


def _refusal_reason(subdivision: MarkedSubdivision, tie_once: bool) -> str:
    marked = subdivision.marked_cells()
    if not marked:
        return REASON_NO_MARKED_CELL
    if len(marked) == 1 and marked[0].lattice_length == 3:
        return REASON_LENGTH_THREE
    for cell in marked:
        for J in combinations(cell.support, 4):
            image = is_exceptional_affine(J)
            if image is not None and image.s == 1:
                return REASON_EXCEPTIONAL
    if tie_once:
        return REASON_TIE_ONCE
    return REASON_NONE


def classify(w: WeightVector) -> ClassificationResult:
    """Decide membership of ``w`` and collect every cone certificate.

    Args:
        w: Weight vector with n >= 4

    Returns:
        ClassificationResult; when no certificate exists the refusal reason
        names the first obstruction found
    """
    if w.n < MIN_N:
        raise ValueError(f"n must be at least {MIN_N}, got {w.n}")
    subdivision = newton_diagram(w)
    triples = _hull_triples(subdivision)
    certificates: List[ConeCertificate] = []
    certificates.extend(_type_i_certificates(w, triples))
    certificates.extend(_type_ii_certificates(w, subdivision))
    type_iii, tie_once = _type_iii_search(w, triples)
    certificates.extend(type_iii)

    result = ClassificationResult(w, subdivision, certificates)
    if not certificates:
        result.refusal_reason = _refusal_reason(subdivision, tie_once)
    logger.debug(
        "classify %s: %d certificate(s), reason=%s",
        w,
        len(certificates),
        result.refusal_reason,
    )
    return result


# ---------------------------------------------------------------------------
# Enumeration and sampling
# ---------------------------------------------------------------------------


def _all_certificates(n: int) -> List[ConeCertificate]:
    points = range(n + 1)
    triples = list(combinations(points, 3))
    certificates: List[ConeCertificate] = []
    for a in triples:
        for b in triples:
            if a[2] <= b[0]:
                certificates.append(TypeI(a, b))
    for J in combinations(points, 4):
        image = is_exceptional_affine(J)
        if image is None or image.s > 1:
            certificates.append(TypeII(J, exceptional=image))
    for sigma in triples:
        i1, i2, i3 = sigma
        for d in divisors(gcd(i3 - i1, i2 - i1)):
            if d < 2:
                continue
            for tie in combinations(noncongruent(sigma, d, n), 2):
                certificates.append(TypeIII(sigma, d, tie))
    return certificates


def enumerate_cones(n: int) -> List[ConeDescriptor]:
    """List every maximal cone for ``4 <= n <= 12`` with its H-description.

    Raises:
        BudgetExceeded: If n is outside the supported range
    """
    if not MIN_N <= n <= MAX_ENUMERATION_N:
        raise BudgetExceeded(
            f"Cone enumeration supports {MIN_N} <= n <= {MAX_ENUMERATION_N}, got {n}"
        )
    cones = [ConeDescriptor(cert, cone_h_description(cert, n)) for cert in _all_certificates(n)]
    logger.info("Enumerated %d cones for n=%d", len(cones), n)
    return cones


def certificate_indices(cert: ConeCertificate) -> Tuple[int, ...]:
    """Every coefficient index the certificate refers to."""
    if isinstance(cert, TypeI):
        return cert.cell_a + cert.cell_b
    if isinstance(cert, TypeII):
        return tuple(cert.cell)
    return cert.sigma + cert.tie


def describe_certificate(cert: ConeCertificate) -> Dict[str, object]:
    """Plain-data view of a certificate (lists of ints)."""
    data: Dict[str, object] = {"type": cert.kind, "interior": cert.interior}
    if isinstance(cert, TypeI):
        data["cells"] = [list(cert.cell_a), list(cert.cell_b)]
    elif isinstance(cert, TypeII):
        data["cell"] = list(cert.cell)
        data["marks"] = list(cert.marks)
        if cert.exceptional is not None:
            data["exceptional"] = {
                "base": list(cert.exceptional.base),
                "s": cert.exceptional.s,
                "r": cert.exceptional.r,
            }
    else:
        data["sigma"] = list(cert.sigma)
        data["g"] = cert.g
        data["d"] = cert.d
        data["tie"] = list(cert.tie)
    return data


def cones_table(n: int) -> pd.DataFrame:
    """Return ``enumerate_cones(n)`` as a DataFrame, one row per cone."""
    rows = []
    for cone in enumerate_cones(n):
        cert = cone.certificate
        data = describe_certificate(cert)
        rows.append(
            {
                "type": cert.kind,
                "cells": " ".join(
                    "{" + ",".join(str(i) for i in part) + "}"
                    for part in data.get("cells", [data.get("cell") or data.get("sigma")])
                ),
                "d": data.get("d"),
                "tie": "{" + ",".join(str(j) for j in data["tie"]) + "}" if "tie" in data else None,
                "equalities": len(cone.h_description.equalities),
                "inequalities": len(cone.h_description.inequalities),
            }
        )
    return pd.DataFrame(rows, columns=["type", "cells", "d", "tie", "equalities", "inequalities"])


def _distinct_heights(rng: random.Random, count: int, n: int) -> List[Fraction]:
    denominator = rng.choice([1, 2, 3, 4])
    return [Fraction(v, denominator) for v in rng.sample(range(1, 8 * (n + 2)), count)]


def _random_slope(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.randint(1, 4))


def sample_interior_point(
    cert: ConeCertificate, n: int, rng: Optional[random.Random] = None
) -> WeightVector:
    """Draw a rational point strictly inside the cone of ``cert``.

    Points off the defining cells get pairwise distinct positive heights, so
    the point is also generic for witness construction.
    """
    rng = rng or random.Random()
    offset = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    if isinstance(cert, TypeI):
        a, b = cert.cell_a, cert.cell_b
        crossing = Fraction(a[2] + b[0], 2)
        slope_a = _random_slope(rng)
        slope_b = slope_a + Fraction(rng.randint(1, 6), rng.randint(1, 4))

        def line_a(x: int) -> Fraction:
            return offset + slope_a * (x - crossing)

        def line_b(x: int) -> Fraction:
            return offset + slope_b * (x - crossing)

        others = [j for j in range(n + 1) if j not in a and j not in b]
        heights = dict(zip(others, _distinct_heights(rng, len(others), n)))
        entries = []
        for j in range(n + 1):
            if j in a:
                entries.append(line_a(j))
            elif j in b:
                entries.append(line_b(j))
            else:
                entries.append(max(line_a(j), line_b(j)) + heights[j])
        return WeightVector(tuple(entries))

    slope = _random_slope(rng)
    if isinstance(cert, TypeII):
        on_line = set(cert.cell)
        origin = cert.cell[0]
    else:
        on_line = set(cert.sigma)
        origin = cert.sigma[0]
    others = [j for j in range(n + 1) if j not in on_line]
    heights = dict(zip(others, _distinct_heights(rng, len(others), n)))
    if isinstance(cert, TypeIII):
        candidates = noncongruent(cert.sigma, cert.d, n)
        tie_height = min(heights[j] for j in candidates)
        for j in candidates:
            if heights[j] == tie_height and j not in cert.tie:
                heights[j] = max(heights.values()) + 1
        for j in cert.tie:
            heights[j] = tie_height
    return WeightVector(
        tuple(
            offset + slope * (j - origin) + (heights[j] if j in heights else 0)
            for j in range(n + 1)
        )
    )
