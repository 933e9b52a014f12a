"""Toolkit for layered sparse random codes: ensembles, thresholds,
Fourier containment bounds, and distance certificates over F_q."""

from .gf import Field, FqElement, field_new
from .errors import (
    LdpcLabError,
    NumericError,
    PreconditionError,
    ResourceGuardError,
)

__all__ = [
    "Field",
    "FqElement",
    "field_new",
    "LdpcLabError",
    "PreconditionError",
    "ResourceGuardError",
    "NumericError",
]

__version__ = "0.1.0"
