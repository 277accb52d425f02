"""Legendre-series baseline: partial sums of the normalized expansion.

Coefficients a_k = (1/2) int_-1^1 f p_k dx with p_k = sqrt(2k+1) P_k, so that
(1/2) int p_k^2 = 1.  Everything runs at a fixed modest precision (default
128 bits); the baseline exists to compare convergence slopes, and the higher
precision keeps its stagnation floor below the fitted error range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
from gmpy2 import mpfr

from ..mpcore import MPReal, graded_boundaries, raw_precision
from ..mpcore.quadrature import QuadratureRule
from ..mpcore.scalars import MIN_PRECISION_BITS, _raw_of

LEGENDRE_BITS = 128


@dataclass(frozen=True)
class LegendreBaseline:
    """Truncated normalized-Legendre expansion on [-1, 1]."""

    K: int
    coefficients: tuple[MPReal, ...]
    precision_bits: int

    def evaluate(self, x) -> MPReal:
        bits = self.precision_bits
        with raw_precision(bits):
            xr = mpfr(_raw_of(x))
            p_prev, p_cur = mpfr(1), xr
            total = self.coefficients[0].value * 1  # p_0 = 1, weight sqrt(1)
            for k in range(1, self.K):
                if k == 1:
                    pk = p_cur
                else:
                    p_prev, p_cur = p_cur, ((2 * k - 1) * xr * p_cur - (k - 1) * p_prev) / k
                    pk = p_cur
                total += self.coefficients[k].value * gmpy2.sqrt(mpfr(2 * k + 1)) * pk
            return MPReal(total, bits)


def legendre_series(
    f: Callable,
    K: int,
    *,
    precision_bits: int = LEGENDRE_BITS,
    singularities: Sequence = (),
    breakpoints: Sequence = (),
) -> LegendreBaseline:
    """First K normalized-Legendre coefficients of f on [-1, 1] by graded
    panel quadrature (all orders accumulated in one recurrence pass)."""
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    bits = max(int(precision_bits), MIN_PRECISION_BITS)
    with raw_precision(bits):
        base = graded_boundaries(
            mpfr(-1), mpfr(1), list(singularities), base_panels=1, precision_bits=bits
        )
        cuts = sorted(set(base) | {mpfr(_raw_of(b)) for b in breakpoints})
        # P_K has ~K zeros across [-1, 1]: keep panels a few zeros wide
        out = [cuts[0]]
        for u, v in zip(cuts[:-1], cuts[1:]):
            extra = max(1, math.ceil(float(v - u) * max(K, 8) / 12.0))
            for j in range(1, extra):
                out.append(u + (v - u) * j / extra)
            out.append(v)
        rule = QuadratureRule(out, 32, bits)
        moments = [mpfr(0)] * K
        for x, w in zip(rule.nodes_raw(), rule.weights_raw()):
            fv = mpfr(_raw_of(f(MPReal(x, bits))))
            wf = w * fv
            p_prev, p_cur = mpfr(1), x
            moments[0] += wf
            for k in range(1, K):
                if k > 1:
                    p_prev, p_cur = p_cur, ((2 * k - 1) * x * p_cur - (k - 1) * p_prev) / k
                moments[k] += wf * p_cur
        half = mpfr(1) / 2
        coeffs = tuple(
            MPReal(half * gmpy2.sqrt(mpfr(2 * k + 1)) * moments[k], bits) for k in range(K)
        )
    return LegendreBaseline(K=K, coefficients=coeffs, precision_bits=bits)
