"""Numerical certification of decay and sup-norm estimates for
Navier-Stokes and conservative advection-diffusion equations."""

from .certificates import BoundCertificate, NormSeries
from .grid import Field, GridSpec, hdot_norm, lp_norm, spectral_derivative

__all__ = ["BoundCertificate", "NormSeries", "Field", "GridSpec", "hdot_norm",
           "lp_norm", "spectral_derivative"]
__version__ = "0.1.0"
