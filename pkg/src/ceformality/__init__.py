"""Exact-arithmetic formality and deformation calculus for finite-dimensional
differential graded Lie algebras and truncated brace structures."""

__version__ = "0.1.0"
