"""Exact computation of triply graded link homology, its y-ification and the
dg algebra acting on Rouquier complexes."""

__version__ = "0.1.0"
