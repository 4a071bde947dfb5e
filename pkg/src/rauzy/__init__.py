"""Rauzy-type dynamics on irreducible permutations."""

from .perm_core import ArcRef, EdgeColoring, Permutation, parse

__all__ = ["ArcRef", "EdgeColoring", "Permutation", "parse"]
__version__ = "0.1.0"
