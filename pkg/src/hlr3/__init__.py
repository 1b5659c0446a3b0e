"""Exact computations with finite-dimensional 3-Hom-Lie-Rinehart algebras."""

__version__ = "0.1.0"
