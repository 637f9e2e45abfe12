"""Exact computations with operads, their bar and cobar constructions, and
the homotopy algebras they produce."""

__version__ = "0.1.0"
