"""galres: GCD-sum computations, extremal set constructions, and the
character / zeta experiments built on top of them.

Subpackage layout:
    ntcore     exact integer arithmetic (factorizations, integer sets)
    galsum     Gal-type pair sums, quadratic norms, local valuation bounds
    extremal   extremal set construction, divisor-set sums, profiles
    characters Dirichlet character tables and orthogonality sums
    lfunc      central L-values via smoothed series
    resonance  resonator sets and moment comparisons
    zetalab    zeta on the critical line, convolution lemma, real resonator
    cli        command-line front end
"""

from ._kernels import backend_name
from .errors import (AccuracyError, CapacityError, ConvergenceError,
                     EmptyRangeError, GalresError, UnsupportedAlgorithmError,
                     ValidationError)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CapacityError", "ConvergenceError", "EmptyRangeError",
    "GalresError", "UnsupportedAlgorithmError", "ValidationError",
    "backend_name", "__version__",
]
