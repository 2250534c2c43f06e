"""Exact and numeric toolkit for negative-index meromorphic Jacobi forms."""
from .gaussian import GaussianRational
from .series import QZSeries

__version__ = "0.1.0"

__all__ = ["GaussianRational", "QZSeries", "__version__"]
