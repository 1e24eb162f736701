"""Exact and numeric toolkit for smooth Danielewski surfaces ``xy = p(z)``."""

from danielewski.kernels import BACKEND
from danielewski.ring import DefiningPoly, Ring, RingElem

__version__ = "0.1.0"

__all__ = ["BACKEND", "DefiningPoly", "Ring", "RingElem", "__version__"]
