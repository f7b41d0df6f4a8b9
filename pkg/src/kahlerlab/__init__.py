"""Numerical laboratory for Chern curvature identities and Schwarz-type estimates."""
from . import _jax  # noqa: F401  (enables float64 jets)

__version__ = "0.1.0"
