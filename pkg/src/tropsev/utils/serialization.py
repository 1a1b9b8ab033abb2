"""Text and JSON forms of weights, series, certificates and witnesses.

Every rational is written as a string (``"3/2"``) so that documents survive
JSON round trips without loss. Documents carry ``"schema": "tropsev/1"``.
"""

import re
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import Add, Rational, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from ..core.arith import CoeffRing, RingElem, to_fraction
from ..core.classifier import (
    ClassificationResult,
    ConeCertificate,
    TypeI,
    TypeII,
    TypeIII,
    certificate_indices,
    describe_certificate,
)
from ..core.minors import is_exceptional_affine
from ..core.newton import AffineTransform, MarkedSubdivision, WeightVector
from ..core.puiseux import PuiseuxTrunc
from ..core.witness import VerificationReport, Witness

SCHEMA = "tropsev/1"

T = Symbol("t")

_O_TERM = re.compile(r"\+?\s*O\(\s*t\s*(?:\^|\*\*)\s*\(?\s*([^()]+?)\s*\)?\s*\)\s*$")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)

Term = Tuple[Fraction, Fraction]


# ---------------------------------------------------------------------------
# Text input
# ---------------------------------------------------------------------------


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Invalid rational number {text!r}") from e


def parse_weights(text: str) -> WeightVector:
    """Parse comma-separated rationals such as ``"2,0,1/2,0,1"``.

    Raises:
        ValueError: If an entry is not a rational or there are fewer than 5
    """
    parts = [p for p in text.split(",") if p.strip()]
    return WeightVector(tuple(parse_rational(p) for p in parts))


def parse_indices(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError as e:
        raise ValueError(f"Invalid index list {text!r}") from e


def parse_series_literal(text: str) -> Tuple[List[Term], Optional[Fraction]]:
    """Parse ``"c0*t^e0 + c1*t^e1 [+ O(t^T)]"`` with rational ``c`` and ``e``.

    Returns:
        Tuple of (terms as (exponent, coefficient), truncation order or None
        when the literal has no O-term and is therefore exact)

    Raises:
        ValueError: If the literal is not a rational Puiseux polynomial
    """
    trunc: Optional[Fraction] = None
    body = text.strip()
    match = _O_TERM.search(body)
    if match:
        trunc = parse_rational(match.group(1))
        body = body[: match.start()].strip()
    if not body:
        return [], trunc
    try:
        expr = parse_expr(body, local_dict={"t": T}, transformations=_TRANSFORMATIONS)
    except Exception as e:
        raise ValueError(f"Cannot parse series literal {text!r}: {e}") from e

    collected: Dict[Fraction, Fraction] = {}
    for part in Add.make_args(expr.expand()):
        coefficient, exponent = part.as_coeff_exponent(T)
        if not (coefficient.is_Rational and isinstance(exponent, Rational)):
            raise ValueError(f"Term {part} of {text!r} is not c*t^e with rational c, e")
        e = Fraction(str(exponent))
        collected[e] = collected.get(e, Fraction(0)) + Fraction(str(coefficient))
    terms = [(e, c) for e, c in sorted(collected.items()) if c != 0]
    if trunc is not None and any(e >= trunc for e, _ in terms):
        raise ValueError(f"Series literal {text!r} has terms beyond its O-term")
    return terms, trunc


def series_from_literal(
    text: str, ring: Optional[CoeffRing] = None, default_trunc: Fraction = Fraction(16)
) -> PuiseuxTrunc:
    ring = ring or CoeffRing.rationals()
    terms, trunc = parse_series_literal(text)
    if trunc is None:
        trunc = max([default_trunc] + [e + 1 for e, _ in terms])
    return PuiseuxTrunc.from_terms(ring, terms, trunc)


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def encode_ring(ring: CoeffRing) -> Dict[str, Any]:
    data = ring.describe()
    data["coefficients"] = [str(to_fraction(c)) for c in ring.modulus]
    return data


def decode_ring(data: Dict[str, Any]) -> CoeffRing:
    kind = data.get("kind")
    if kind == "rational":
        return CoeffRing.rationals()
    if kind == "cyclotomic":
        return CoeffRing.cyclotomic(int(data["order"]))
    if kind == "dynamic":
        return CoeffRing.dynamic([parse_rational(c) for c in data["coefficients"]])
    raise ValueError(f"Unknown ring kind {kind!r}")


def encode_element(value: RingElem) -> List[str]:
    """Representative coefficients, highest degree first."""
    return [str(to_fraction(c)) for c in value.rep]


def decode_element(ring: CoeffRing, data: Sequence[str]) -> RingElem:
    return ring.element(tuple(parse_rational(c) for c in data))


def encode_series(series: PuiseuxTrunc) -> Dict[str, Any]:
    return {
        "trunc": str(series.trunc),
        "terms": [[str(e), encode_element(c)] for e, c in series.terms],
        "text": str(series),
    }


def decode_series(ring: CoeffRing, data: Dict[str, Any]) -> PuiseuxTrunc:
    terms = [(parse_rational(e), decode_element(ring, c)) for e, c in data["terms"]]
    return PuiseuxTrunc.from_terms(ring, terms, parse_rational(data["trunc"]))


def encode_weight(w: WeightVector) -> List[str]:
    return [str(v) for v in w]


def decode_weight(data: Sequence[str]) -> WeightVector:
    return WeightVector(tuple(parse_rational(str(v)) for v in data))


def encode_certificate(cert: ConeCertificate) -> Dict[str, Any]:
    return describe_certificate(cert)


def decode_certificate(data: Dict[str, Any]) -> ConeCertificate:
    """Inverse of ``encode_certificate``.

    Raises:
        ValueError: If the certificate type is unknown or fields are missing
    """
    kind = data.get("type")
    interior = bool(data.get("interior", False))
    try:
        if kind == "I":
            cell_a, cell_b = (tuple(int(i) for i in cell) for cell in data["cells"])
            return TypeI(cell_a, cell_b, interior)
        if kind == "II":
            cell = tuple(int(i) for i in data["cell"])
            return TypeII(cell, interior, is_exceptional_affine(cell))
        if kind == "III":
            return TypeIII(
                tuple(int(i) for i in data["sigma"]),
                int(data["d"]),
                tuple(int(j) for j in data["tie"]),
                interior,
            )
    except (KeyError, TypeError) as e:
        raise ValueError(f"Malformed certificate {data!r}") from e
    raise ValueError(f"Unknown certificate type {kind!r}")


def encode_subdivision(subdivision: MarkedSubdivision) -> List[Dict[str, Any]]:
    return [
        {
            "support": list(cell.support),
            "slope": str(cell.slope),
            "marked": list(cell.marked),
        }
        for cell in subdivision
    ]


def encode_classification(result: ClassificationResult) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "schema": SCHEMA,
        "weight": encode_weight(result.weight),
        "member": result.member,
        "certificates": [encode_certificate(c) for c in result.certificates],
        "cells": encode_subdivision(result.subdivision),
    }
    if result.refusal_reason is not None:
        data["reason"] = result.refusal_reason
    return data


def encode_witness(witness: Witness) -> Dict[str, Any]:
    return {
        "kind": witness.kind,
        "ring": encode_ring(witness.ring),
        "b": encode_series(witness.b),
        "coefficients": [encode_series(c) for c in witness.coefficients],
        "transform": {
            "alpha": str(witness.transform.alpha),
            "shift": str(witness.transform.shift),
        },
        "weight": encode_weight(witness.weight),
        "certificate": encode_certificate(witness.certificate),
        "J": list(witness.J),
        "details": _plain(witness.details),
    }


def decode_witness(data: Dict[str, Any]) -> Witness:
    """Rebuild a witness from ``encode_witness`` output.

    Raises:
        ValueError: If a field is missing or malformed, or an index of the
            certificate or of ``J`` lies outside ``0..n``
    """
    try:
        ring = decode_ring(data["ring"])
        transform = AffineTransform(
            parse_rational(data["transform"]["alpha"]),
            parse_rational(data["transform"]["shift"]),
        )
        coefficients = tuple(decode_series(ring, c) for c in data["coefficients"])
        certificate = decode_certificate(data["certificate"])
        J = tuple(int(i) for i in data["J"])
        n = len(coefficients) - 1
        for i in certificate_indices(certificate) + J:
            if not 0 <= i <= n:
                raise ValueError(f"Index {i} outside 0..{n} in witness document")
        return Witness(
            data["kind"],
            ring,
            decode_series(ring, data["b"]),
            coefficients,
            transform,
            decode_weight(data["weight"]),
            certificate,
            J,
            dict(data.get("details", {})),
        )
    except (KeyError, TypeError) as e:
        raise ValueError(f"Malformed witness document: {e}") from e


def encode_report(report: VerificationReport) -> Dict[str, Any]:
    return {
        "passed": report.passed,
        "checks": [
            {"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks
        ],
    }


def format_int_poly(coefficients: Sequence[int], variable: str = "x") -> str:
    """Compact text such as ``x^5-4x^4+6x^3-4x^2+x`` from ascending coefficients."""
    parts = []
    for exponent in range(len(coefficients) - 1, -1, -1):
        c = coefficients[exponent]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        magnitude = abs(c)
        if exponent == 0:
            body = str(magnitude)
        else:
            power = variable if exponent == 1 else f"{variable}^{exponent}"
            body = power if magnitude == 1 else f"{magnitude}{power}"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == "-" else "") + first_body
    return text + "".join(sign + body for sign, body in parts[1:])
