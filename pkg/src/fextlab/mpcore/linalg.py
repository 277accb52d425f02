"""Dense multiprecision helpers on plain lists of gmpy2 scalars.

Internal plumbing: every routine assumes the caller has already set the
thread-local gmpy2 precision (see `scalars.raw_precision`) and works on raw
mpfr/mpc values.  Matrices are lists of row lists.
"""

from __future__ import annotations

from ..errors import NotPositiveDefinite


def matvec(A, x):
    return [sum(row[j] * x[j] for j in range(len(x))) for row in A]


def forward_substitution(L, b):
    """Solve L y = b for lower-triangular L."""
    n = len(b)
    y = [None] * n
    for i in range(n):
        s = b[i]
        row = L[i]
        for j in range(i):
            s -= row[j] * y[j]
        y[i] = s / row[i]
    return y


def back_substitution_transposed(L, y):
    """Solve L^T x = y for lower-triangular L (so L^T is upper)."""
    n = len(y)
    x = [None] * n
    for i in range(n - 1, -1, -1):
        s = y[i]
        for j in range(i + 1, n):
            s -= L[j][i] * x[j]
        x[i] = s / L[i][i]
    return x


def lower_inverse(L):
    """Rows of L^{-1} for lower-triangular L (result is lower-triangular)."""
    n = len(L)
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        inv[i][i] = 1 / L[i][i]
        for j in range(i - 1, -1, -1):
            s = 0
            for k in range(j, i):
                s += L[i][k] * inv[k][j]
            inv[i][j] = -s / L[i][i]
    return inv


def cholesky_dense(A):
    """Lower Cholesky factor of a dense SPD matrix; raises NotPositiveDefinite."""
    n = len(A)
    L = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = A[i][j]
            Li, Lj = L[i], L[j]
            for k in range(j):
                s -= Li[k] * Lj[k]
            if i == j:
                if s <= 0:
                    raise NotPositiveDefinite(i, s)
                import gmpy2

                L[i][i] = gmpy2.sqrt(s)
            else:
                L[i][j] = s / Lj[j]
    return L


def solve_gauss(A, b):
    """Gaussian elimination with partial pivoting; A is consumed as a copy."""
    n = len(b)
    M = [list(row) for row in A]
    v = list(b)
    for col in range(n):
        p = max(range(col, n), key=lambda r: abs(M[r][col]))
        if M[p][col] == 0:
            raise ZeroDivisionError(f"singular system at column {col}")
        if p != col:
            M[col], M[p] = M[p], M[col]
            v[col], v[p] = v[p], v[col]
        piv = M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] / piv
            if f == 0:
                continue
            Mr, Mc = M[r], M[col]
            for c in range(col, n):
                Mr[c] -= f * Mc[c]
            v[r] -= f * v[col]
    x = [None] * n
    for i in range(n - 1, -1, -1):
        s = v[i]
        for j in range(i + 1, n):
            s -= M[i][j] * x[j]
        x[i] = s / M[i][i]
    return x


def max_abs(values) -> float:
    m = 0
    for v in values:
        a = abs(v)
        if a > m:
            m = a
    return m
