"""Multiprecision substrate: scalars, Toeplitz Cholesky, Jacobi eigen, quadrature."""

from .scalars import (
    MIN_PRECISION_BITS,
    MPComplex,
    MPReal,
    acos,
    asin,
    atan,
    atan2,
    cos,
    exp,
    exp_i_pi,
    format_scalar,
    log,
    pi,
    raw_precision,
    sin,
    sinc,
    sqrt,
    tan,
)
from .toeplitz import CholeskyFactor, HermitianToeplitz, cholesky, cholesky_dense_rows
from .eigen import EigenDecomposition, jacobi_eigen
from .quadrature import (
    GRADED_LEVELS,
    GRADED_RATIO,
    QuadratureRule,
    gauss_legendre_panels,
    graded_boundaries,
    legendre_nodes,
    refine_boundaries,
)


def prolate_precision_bits(N: int) -> int:
    """Default working precision for prolate solves of dimension N.

    The prolate matrix condition number grows exponentially in N, so the
    budget scales linearly with N; N is capped at desk scale (<= 129) which
    keeps this cheap.
    """
    return max(256, 24 * int(N))


__all__ = [
    "MIN_PRECISION_BITS",
    "MPComplex",
    "MPReal",
    "CholeskyFactor",
    "EigenDecomposition",
    "HermitianToeplitz",
    "QuadratureRule",
    "acos",
    "asin",
    "atan",
    "atan2",
    "cholesky",
    "cholesky_dense_rows",
    "cos",
    "exp",
    "exp_i_pi",
    "format_scalar",
    "gauss_legendre_panels",
    "graded_boundaries",
    "jacobi_eigen",
    "legendre_nodes",
    "log",
    "pi",
    "prolate_precision_bits",
    "raw_precision",
    "refine_boundaries",
    "sin",
    "sinc",
    "sqrt",
    "tan",
    "GRADED_LEVELS",
    "GRADED_RATIO",
]
