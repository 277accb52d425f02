"""Symmetric eigendecomposition by cyclic two-sided Jacobi rotations.

Chosen for multiprecision robustness at the dimensions used here (N <= 129);
small eigenvalues of positive definite inputs come out with high relative
accuracy, which the regularized solver depends on.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpfr

from ..errors import NoConvergence
from .scalars import MIN_PRECISION_BITS, MPReal, raw_precision, _raw_of
from .toeplitz import HermitianToeplitz

_MAX_SWEEPS = 60


class EigenDecomposition:
    """Descending eigenvalues and the matching orthogonal eigenvector columns."""

    __slots__ = ("_values", "_columns", "N", "precision_bits")

    def __init__(self, values_raw, columns_raw, precision_bits: int):
        self._values = values_raw
        self._columns = columns_raw
        self.N = len(values_raw)
        self.precision_bits = precision_bits

    @property
    def eigenvalues(self) -> tuple[MPReal, ...]:
        return tuple(MPReal(v, self.precision_bits) for v in self._values)

    def eigenvalues_raw(self) -> list[mpfr]:
        return list(self._values)

    def eigenvector(self, j: int) -> tuple[MPReal, ...]:
        return tuple(MPReal(v, self.precision_bits) for v in self._columns[j])

    def columns_raw(self) -> list[list[mpfr]]:
        return self._columns

    def reconstruction_residual_max(self, A) -> MPReal:
        """max_ij |(V diag(lambda) V^T - A)_ij|."""
        dense = A.to_dense_raw() if isinstance(A, HermitianToeplitz) else A
        n = self.N
        with raw_precision(self.precision_bits):
            worst = mpfr(0)
            cols = self._columns
            vals = self._values
            for i in range(n):
                for j in range(i + 1):
                    s = -mpfr(_raw_of(dense[i][j]))
                    for k in range(n):
                        s += vals[k] * cols[k][i] * cols[k][j]
                    a = abs(s)
                    if a > worst:
                        worst = a
        return MPReal(worst, self.precision_bits)

    def orthogonality_residual_max(self) -> MPReal:
        """max_ij |(V^T V - I)_ij|."""
        n = self.N
        with raw_precision(self.precision_bits):
            worst = mpfr(0)
            for i in range(n):
                ci = self._columns[i]
                for j in range(i + 1):
                    cj = self._columns[j]
                    s = mpfr(-1) if i == j else mpfr(0)
                    for k in range(n):
                        s += ci[k] * cj[k]
                    a = abs(s)
                    if a > worst:
                        worst = a
        return MPReal(worst, self.precision_bits)


def jacobi_eigen(A, precision_bits: int | None = None) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix (Toeplitz or dense rows).

    Raises NoConvergence if the off-diagonal mass has not dropped below the
    roundoff floor within the sweep budget.
    """
    if isinstance(A, HermitianToeplitz):
        bits = precision_bits or A.precision_bits
        dense = A.to_dense_raw()
    else:
        bits = max(int(precision_bits or MIN_PRECISION_BITS), MIN_PRECISION_BITS)
        dense = A
    bits = max(int(bits), MIN_PRECISION_BITS)
    n = len(dense)
    with raw_precision(bits):
        M = [[mpfr(_raw_of(v)) for v in row] for row in dense]
        V = [[mpfr(1) if i == j else mpfr(0) for j in range(n)] for i in range(n)]
        scale = mpfr(0)
        for i in range(n):
            for j in range(n):
                a = abs(M[i][j])
                if a > scale:
                    scale = a
        if scale == 0:
            scale = mpfr(1)
        stop = scale * mpfr(2) ** (-bits + 2)
        one = mpfr(1)
        for _sweep in range(_MAX_SWEEPS):
            off = mpfr(0)
            for p in range(n - 1):
                Mp = M[p]
                for q in range(p + 1, n):
                    apq = Mp[q]
                    a = abs(apq)
                    if a > off:
                        off = a
                    if a <= stop:
                        continue
                    app, aqq = Mp[p], M[q][q]
                    theta = (aqq - app) / (2 * apq)
                    if theta >= 0:
                        t = one / (theta + gmpy2.sqrt(theta * theta + one))
                    else:
                        t = -one / (-theta + gmpy2.sqrt(theta * theta + one))
                    c = one / gmpy2.sqrt(t * t + one)
                    s = t * c
                    tau = s / (one + c)
                    Mq = M[q]
                    Mp[p] = app - t * apq
                    Mq[q] = aqq + t * apq
                    Mp[q] = mpfr(0)
                    Mq[p] = mpfr(0)
                    for k in range(n):
                        if k == p or k == q:
                            continue
                        Mk = M[k]
                        akp, akq = Mk[p], Mk[q]
                        Mk[p] = akp - s * (akq + tau * akp)
                        Mk[q] = akq + s * (akp - tau * akq)
                        Mp[k] = Mk[p]
                        Mq[k] = Mk[q]
                    for k in range(n):
                        Vk = V[k]
                        vkp, vkq = Vk[p], Vk[q]
                        Vk[p] = vkp - s * (vkq + tau * vkp)
                        Vk[q] = vkq + s * (vkp - tau * vkq)
            if off <= stop:
                break
        else:
            raise NoConvergence(
                f"Jacobi sweeps exhausted at off-diagonal {float(off):.3e} "
                f"(target {float(stop):.3e}, N={n}, bits={bits})"
            )
        pairs = sorted(((M[i][i], i) for i in range(n)), key=lambda t: t[0], reverse=True)
        values = [v for v, _ in pairs]
        columns = [[V[r][i] for r in range(n)] for _, i in pairs]
    return EigenDecomposition(values, columns, bits)
