"""Explicit zero-counting bounds for Dedekind zeta functions."""

from .core import PUBLISHED_PARAMS, DomainError, FieldSignature, Params
from .theorem import bound_NK, corollary_riemann, derive_constants, load_zero_table, validate

__all__ = [
    "PUBLISHED_PARAMS",
    "DomainError",
    "FieldSignature",
    "Params",
    "bound_NK",
    "corollary_riemann",
    "derive_constants",
    "load_zero_table",
    "validate",
]
__version__ = "0.1.0"
