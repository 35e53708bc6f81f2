"""Exact verification of quadratic twisting operators for GL(2) and GSp(4)."""

__version__ = "0.1.0"
