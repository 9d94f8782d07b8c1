"""Exact engine for wall structures on polyhedral pseudomanifolds:
truncated monoid-ring arithmetic, wall crossing and consistency checks,
scattering completion, broken-line enumeration and canonical theta bases."""

from .algebra import (Cyclo, Element, Exponent, TruncationSpec,
                      ContextMismatch, NotAUnit, NotOnePlusNilpotent)
from .complex import AffMap, AffineComplex, Cell, ComplexError, MPAFunction, Piece

__all__ = [
    "Cyclo", "Element", "Exponent", "TruncationSpec",
    "ContextMismatch", "NotAUnit", "NotOnePlusNilpotent",
    "AffMap", "AffineComplex", "Cell", "ComplexError", "MPAFunction", "Piece",
]

__version__ = "0.1.0"
