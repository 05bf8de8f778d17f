"""Numerical toolkit for the coupled-SUSY Segal-Bargmann spaces and transforms.

The generalization of the harmonic oscillator with ladder operators
a = (x^(1-n) d/dx + x^n)/sqrt(2) and b = (d/dx x^(1-n) + x^n)/sqrt(2) on
functions p(x) exp(-x^(2n)/(2n)), its two holomorphic Segal-Bargmann-type
spaces with modified-Bessel weights, and the unitary transforms between them.
"""

from .params import LatticeError, Sector, SectorMismatchError, SusyParams

__all__ = ["LatticeError", "Sector", "SectorMismatchError", "SusyParams"]
__version__ = "0.1.0"
