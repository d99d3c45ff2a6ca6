"""Exact Gaussian-rational algebra for twisted generalized complex geometry."""

from .scalars import GaussianRational, Poly, parse_poly, parse_scalar
from .spinor import Chart, FormVector, GeneralizedVector

__version__ = "0.1.0"

__all__ = ["GaussianRational", "Poly", "parse_poly", "parse_scalar", "Chart", "FormVector", "GeneralizedVector"]
