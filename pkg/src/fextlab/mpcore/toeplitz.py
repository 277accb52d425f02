"""Symmetric positive definite Toeplitz matrices and their Cholesky factors.

The factorization uses the O(N^2) generator (Schur) recursion with hyperbolic
rotations, which the round-trip tests validate against the dense definition.
At the working precisions used here (hundreds to thousands of bits) the
recursion has enormous headroom over the required residual bound.
"""

from __future__ import annotations

from typing import Sequence

import gmpy2
from gmpy2 import mpfr

from ..errors import NotPositiveDefinite
from . import linalg
from .scalars import MIN_PRECISION_BITS, MPReal, raw_precision, _raw_of


class HermitianToeplitz:
    """Real symmetric Toeplitz matrix defined by its first row.

    entry(k, j) == first_row[|k - j|]; the prolate instances used throughout
    are positive definite with unit diagonal.
    """

    __slots__ = ("_row", "N", "precision_bits")

    def __init__(self, first_row: Sequence, precision_bits: int):
        bits = max(int(precision_bits), MIN_PRECISION_BITS)
        with raw_precision(bits):
            self._row = tuple(mpfr(_raw_of(v)) for v in first_row)
        self.N = len(self._row)
        self.precision_bits = bits

    @property
    def first_row(self) -> tuple[MPReal, ...]:
        return tuple(MPReal(v, self.precision_bits) for v in self._row)

    def entry(self, k: int, j: int) -> MPReal:
        return MPReal(self._row[abs(k - j)], self.precision_bits)

    def entry_raw(self, k: int, j: int) -> mpfr:
        return self._row[abs(k - j)]

    def row_raw(self) -> tuple[mpfr, ...]:
        return self._row

    def to_dense_raw(self) -> list[list[mpfr]]:
        r = self._row
        return [[r[abs(i - j)] for j in range(self.N)] for i in range(self.N)]

    def norm_max(self) -> MPReal:
        return MPReal(linalg.max_abs(self._row), self.precision_bits)


class CholeskyFactor:
    """Lower-triangular factor L with L L^T reproducing the source matrix."""

    __slots__ = ("_rows", "N", "precision_bits")

    def __init__(self, rows: list[list[mpfr]], precision_bits: int):
        self._rows = rows
        self.N = len(rows)
        self.precision_bits = precision_bits

    def entry(self, i: int, j: int) -> MPReal:
        v = self._rows[i][j] if j <= i else mpfr(0)
        return MPReal(v, self.precision_bits)

    def rows_raw(self) -> list[list[mpfr]]:
        return self._rows

    def solve_raw(self, b: Sequence):
        """Solve (L L^T) x = b on raw gmpy2 scalars (real or complex)."""
        with raw_precision(self.precision_bits):
            y = linalg.forward_substitution(self._rows, list(b))
            return linalg.back_substitution_transposed(self._rows, y)

    def diagonal(self) -> tuple[MPReal, ...]:
        return tuple(MPReal(self._rows[i][i], self.precision_bits) for i in range(self.N))

    def residual_max(self, A: HermitianToeplitz) -> MPReal:
        """max_ij |(L L^T - A)_ij|, the round-trip defect."""
        with raw_precision(self.precision_bits):
            worst = mpfr(0)
            for i in range(self.N):
                Li = self._rows[i]
                for j in range(i + 1):
                    Lj = self._rows[j]
                    s = -A.entry_raw(i, j)
                    for k in range(j + 1):
                        s += Li[k] * Lj[k]
                    a = abs(s)
                    if a > worst:
                        worst = a
        return MPReal(worst, self.precision_bits)


def cholesky(A: HermitianToeplitz) -> CholeskyFactor:
    """Cholesky factor of a positive definite symmetric Toeplitz matrix.

    Raises NotPositiveDefinite when a pivot fails, which for prolate systems
    signals that the working precision is too low for this dimension.
    """
    n = A.N
    bits = A.precision_bits
    with raw_precision(bits):
        t = list(A.row_raw())
        if t[0] <= 0:
            raise NotPositiveDefinite(0, t[0])
        sq = gmpy2.sqrt(t[0])
        g1 = [v / sq for v in t]
        g2 = [mpfr(0)] + g1[1:]
        cols = [list(g1)]
        for i in range(1, n):
            # shift the first generator row right by one
            g1[i:] = g1[i - 1:n - 1]
            g1[i - 1] = mpfr(0)
            rho = g2[i] / g1[i]
            rad = (1 - rho) * (1 + rho)
            if rad <= 0:
                raise NotPositiveDefinite(i, rad)
            den = gmpy2.sqrt(rad)
            for j in range(i, n):
                a, b = g1[j], g2[j]
                g1[j] = (a - rho * b) / den
                g2[j] = (b - rho * a) / den
            cols.append(g1[i:])
        rows = [[cols[j][i - j] if j <= i else mpfr(0) for j in range(i + 1)] for i in range(n)]
    return CholeskyFactor(rows, bits)


def cholesky_dense_rows(rows: list[list], precision_bits: int) -> CholeskyFactor:
    """Dense-definition Cholesky for non-Toeplitz SPD input (test oracle path)."""
    bits = max(int(precision_bits), MIN_PRECISION_BITS)
    with raw_precision(bits):
        A = [[mpfr(_raw_of(v)) for v in row] for row in rows]
        L = linalg.cholesky_dense(A)
    return CholeskyFactor(L, bits)
