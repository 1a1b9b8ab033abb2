"""tropsev - Membership, certificates and witnesses for tropical Severi varieties."""

__version__ = "1.0.0"

from .core.classifier import classify, enumerate_cones
from .core.newton import WeightVector, newton_diagram
from .core.trop_kernel import ValMatrix, in_trop_kernel
from .core.witness import build_witness, verify_witness
from .errors import TropSevError

__all__ = [
    "TropSevError",
    "ValMatrix",
    "WeightVector",
    "build_witness",
    "classify",
    "enumerate_cones",
    "in_trop_kernel",
    "newton_diagram",
    "verify_witness",
]
