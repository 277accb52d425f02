"""fextlab: multiprecision Fourier extension approximation laboratory.

Approximates functions on an interval by Fourier series periodic on a larger
interval [-T, T], solved as a least-squares problem at high precision.
Companion instruments: the arc-polynomial projection kernel, Lebesgue
functions, best uniform (minimax) approximation, convergence-geometry
predictions, and a reproducible experiment harness.
"""

from . import analysis, arcpoly, errors, fourext, geometry, harness, mpcore
from .errors import (
    BranchError,
    DegenerateReference,
    ExchangeStalled,
    FextlabError,
    NoConvergence,
    NotPositiveDefinite,
    OutOfRegime,
    RootNotFound,
    ToleranceNotMet,
)
from .fourext import (
    Extension,
    FEProblem,
    ProlateSystem,
    build_gram,
    build_rhs,
    error_norms,
    extend,
    solve_exact,
    solve_regularized,
)
from .mpcore import MPComplex, MPReal, prolate_precision_bits

__version__ = "0.1.0"

__all__ = [
    "analysis",
    "arcpoly",
    "errors",
    "fourext",
    "geometry",
    "harness",
    "mpcore",
    "BranchError",
    "DegenerateReference",
    "ExchangeStalled",
    "Extension",
    "FEProblem",
    "FextlabError",
    "MPComplex",
    "MPReal",
    "NoConvergence",
    "NotPositiveDefinite",
    "OutOfRegime",
    "ProlateSystem",
    "RootNotFound",
    "ToleranceNotMet",
    "build_gram",
    "build_rhs",
    "error_norms",
    "extend",
    "prolate_precision_bits",
    "solve_exact",
    "solve_regularized",
    "__version__",
]
