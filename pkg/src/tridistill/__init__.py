"""Triorthogonal matrices and the magic-state distillation protocols they define."""

from .gf2 import BinaryMatrix
from .triortho import TriorthogonalMatrix, builtin, generate_gk, validate

__all__ = ["BinaryMatrix", "TriorthogonalMatrix", "builtin", "generate_gk", "validate"]
__version__ = "0.1.0"
