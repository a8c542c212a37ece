"""Exact toolkit for integrable polynomial deformations of exact 1-forms."""

from .scalars import I, GaussianRational, as_scalar
from .polynomial import NEG_INF, Polynomial, parse_polynomial, ring
from .forms import LogForm, PForm, d, pullback, radial_contraction, wedge

__all__ = [
    "I",
    "GaussianRational",
    "as_scalar",
    "NEG_INF",
    "Polynomial",
    "parse_polynomial",
    "ring",
    "LogForm",
    "PForm",
    "d",
    "pullback",
    "radial_contraction",
    "wedge",
]
__version__ = "0.1.0"
