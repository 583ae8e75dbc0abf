"""Resonances of radial step potentials on the logarithmic cover in even dimensions.

Submodules: ``logcover`` (points of the cover), ``specfun`` (Bessel and
Hankel functions, compiled or pure), ``mode`` (partial waves and radial
kernels), ``birman`` (Birman-Schwinger determinants), ``resonances``
(zero search and counting), ``growthlab`` (half-plane function theory
checks) and ``cli``.
"""
from .errors import (DomainError, NotPositiveDefiniteError, NumericalError,
                     PreconditionError, UncertifiedAccuracyWarning)

__version__ = "0.1.0"

__all__ = ["DomainError", "NotPositiveDefiniteError", "NumericalError",
           "PreconditionError", "UncertifiedAccuracyWarning", "__version__"]
