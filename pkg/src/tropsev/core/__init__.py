"""Core functionality for tropsev package."""

from .arith import CoeffRing, RingElem
from .classifier import ClassificationResult, TypeI, TypeII, TypeIII, classify
from .newton import MarkedSubdivision, WeightVector, newton_diagram
from .puiseux import PuiseuxTrunc
from .witness import Witness, build_witness, verify_witness

__all__ = [
    "ClassificationResult",
    "CoeffRing",
    "MarkedSubdivision",
    "PuiseuxTrunc",
    "RingElem",
    "TypeI",
    "TypeII",
    "TypeIII",
    "Witness",
    "WeightVector",
    "build_witness",
    "classify",
    "newton_diagram",
    "verify_witness",
]
