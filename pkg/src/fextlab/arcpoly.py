"""Legendre polynomials on a circular arc and the prolate kernel they generate.

The basis {Pi_k} is orthonormal on the unit circle for the weight
2T * chi_{[-pi/T, pi/T]}; it is built from the Cholesky factor of the Toeplitz
moment matrix [mu_{j-k}] with mu_j = 2 sinc(j pi / T) (exactly twice the
prolate Gram matrix).  The Christoffel-Darboux combination of Pi_N yields the
projection kernel K_N on [-1, 1], and large-N evaluation is available through
cosine/sine (interior) and Bessel J0/J1 (endpoint) asymptotic formulas.

Convention: Pi_k has positive leading coefficient chi_k.  With that
normalization the asymptotic formulas carry a global phase i^N; the kernel
and all magnitudes are insensitive to it, and the exact-basis comparison
tests pin it down.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import BranchError, NotPositiveDefinite, OutOfRegime
from .mpcore import (
    HermitianToeplitz,
    MPComplex,
    MPReal,
    cholesky,
    raw_precision,
)
from .mpcore.linalg import lower_inverse
from .mpcore.scalars import MIN_PRECISION_BITS, _raw_of

REGIME_DELTA = 0.2
NEAR_DIAGONAL_SWITCH = 2.0 ** -20
_BUILD_ESCALATIONS = 3


def moments(T, j: int, *, precision_bits: int = 256) -> MPReal:
    """Trigonometric moment mu_j = 2 sinc(j pi / T) of the arc weight."""
    bits = max(int(precision_bits), MIN_PRECISION_BITS)
    j = abs(int(j))
    with raw_precision(bits + 16):
        Tr = mpfr(_raw_of(T))
        if j == 0:
            return MPReal(2, bits)
        t = j * gmpy2.const_pi() / Tr
        return MPReal(2 * gmpy2.sin(t) / t, bits)


class ArcPolyBasis:
    """Orthonormal arc polynomials Pi_0..Pi_M with real monomial coefficients."""

    __slots__ = ("T_raw", "max_degree", "_rows", "_leading", "precision_bits")

    def __init__(self, T_raw: mpfr, rows: list[list[mpfr]], precision_bits: int):
        self.T_raw = T_raw
        self._rows = rows
        self.max_degree = len(rows) - 1
        self.precision_bits = precision_bits
        self._leading = [row[-1] for row in rows]

    @property
    def T(self) -> MPReal:
        return MPReal(self.T_raw, self.precision_bits)

    def coefficients(self, k: int) -> tuple[MPReal, ...]:
        """Monomial coefficients of Pi_k, constant term first."""
        return tuple(MPReal(v, self.precision_bits) for v in self._rows[k])

    def coefficients_raw(self, k: int) -> list[mpfr]:
        return list(self._rows[k])

    def leading_coefficient(self, k: int) -> MPReal:
        return MPReal(self._leading[k], self.precision_bits)

    def eval_raw(self, k: int, z: mpc) -> mpc:
        acc = mpc(0)
        for c in reversed(self._rows[k]):
            acc = acc * z + c
        return acc

    def eval_on_arc_raw(self, k: int, x) -> mpc:
        """Pi_k(e^{i pi x / T}) for x in [-T, T]."""
        with raw_precision(self.precision_bits):
            theta = gmpy2.const_pi() * mpfr(_raw_of(x)) / self.T_raw
            s, c = gmpy2.sin_cos(theta)
            return self.eval_raw(k, mpc(c, s))

    def eval_on_arc(self, k: int, x) -> MPComplex:
        return MPComplex(self.eval_on_arc_raw(k, x), self.precision_bits)

    def at_precision(self, precision_bits: int) -> "ArcPolyBasis":
        """Rounded copy for cheaper downstream evaluation."""
        bits = max(int(precision_bits), MIN_PRECISION_BITS)
        with raw_precision(bits):
            rows = [[mpfr(c) for c in row] for row in self._rows]
            return ArcPolyBasis(mpfr(self.T_raw), rows, bits)


def build_basis(T, M: int, precision_bits: int | None = None) -> ArcPolyBasis:
    """Arc basis to degree M via Cholesky of the moment matrix.

    Escalates precision (doubling, up to 3 times) if positive definiteness is
    lost at the requested precision.
    """
    M = int(M)
    if M < 0:
        raise ValueError("M must be >= 0")
    bits = max(int(precision_bits or max(256, 24 * (M + 1))), MIN_PRECISION_BITS)
    last_exc: Exception | None = None
    for _ in range(_BUILD_ESCALATIONS + 1):
        with raw_precision(bits + 16):
            Tr = mpfr(_raw_of(T))
            if not Tr >= 1:
                raise ValueError("T must be >= 1")
            pi = gmpy2.const_pi()
            row = [mpfr(2)]
            for m in range(1, M + 1):
                t = m * pi / Tr
                row.append(2 * gmpy2.sin(t) / t)
        moment_matrix = HermitianToeplitz(row, bits)
        try:
            L = cholesky(moment_matrix)
        except NotPositiveDefinite as exc:
            last_exc = exc
            bits *= 2
            continue
        with raw_precision(bits):
            rows = lower_inverse(L.rows_raw())
            rows = [rows[k][: k + 1] for k in range(M + 1)]
            return ArcPolyBasis(mpfr(Tr), rows, bits)
    raise last_exc  # type: ignore[misc]


def reflected(coefficients: Sequence) -> tuple[MPComplex, ...]:
    """Reversal-conjugation z^N * conj(P(1/conj(z))): coefficient vector
    reversed and conjugated."""
    bits = max(
        [MIN_PRECISION_BITS]
        + [c.precision_bits for c in coefficients if isinstance(c, (MPReal, MPComplex))]
    )
    with raw_precision(bits):
        return tuple(
            MPComplex(mpc(_raw_of(c)).conjugate(), bits) for c in reversed(list(coefficients))
        )


@dataclass(frozen=True)
class KernelEval:
    """One prolate-kernel sample K_N(x, y); real, Hermitian-symmetric."""

    x: float
    y: float
    N: int
    value: MPReal


def _phase_times_poly(basis: ArcPolyBasis, N: int, x: mpfr) -> mpc:
    """e^{-i pi N x / (2T)} * Pi_N(e^{i pi x / T}) at the basis precision."""
    theta = gmpy2.const_pi() * x / basis.T_raw
    s, c = gmpy2.sin_cos(theta)
    z = mpc(c, s)
    half = theta * N / 2
    hs, hc = gmpy2.sin_cos(half)
    return mpc(hc, -hs) * basis.eval_raw(N, z)


def kernel_direct_sum_raw(basis: ArcPolyBasis, N: int, x, y) -> mpc:
    """Oracle form: e^{i pi (N-1)(y-x)/(2T)} sum_{k<N} conj(Pi_k(z_y)) Pi_k(z_x)."""
    with raw_precision(basis.precision_bits):
        xr, yr = mpfr(_raw_of(x)), mpfr(_raw_of(y))
        pi = gmpy2.const_pi()
        tx = pi * xr / basis.T_raw
        ty = pi * yr / basis.T_raw
        sx, cx = gmpy2.sin_cos(tx)
        sy, cy = gmpy2.sin_cos(ty)
        zx, zy = mpc(cx, sx), mpc(cy, sy)
        total = mpc(0)
        for k in range(N):
            total += basis.eval_raw(k, zy).conjugate() * basis.eval_raw(k, zx)
        ph = (ty - tx) * (N - 1) / 2
        ps, pc = gmpy2.sin_cos(ph)
        return mpc(pc, ps) * total


def cd_kernel(x, y, basis: ArcPolyBasis, N: int) -> KernelEval:
    """Prolate kernel K_N(x, y) via the Christoffel-Darboux closed form.

    Near the diagonal (|x - y| below the cancellation switch) the direct sum
    is used instead; the closed form's 0/0 there is removable.
    """
    if N > basis.max_degree:
        raise ValueError("basis degree too low for requested N")
    bits = basis.precision_bits
    with raw_precision(bits):
        xr, yr = mpfr(_raw_of(x)), mpfr(_raw_of(y))
        if abs(xr - yr) < NEAR_DIAGONAL_SWITCH:
            v = kernel_direct_sum_raw(basis, N, xr, yr)
            return KernelEval(float(xr), float(yr), N, MPReal(v.real, bits))
        qx = _phase_times_poly(basis, N, xr)
        qy = _phase_times_poly(basis, N, yr)
        den = gmpy2.sin(gmpy2.const_pi() * (xr - yr) / (2 * basis.T_raw))
        v = (qy.conjugate() * qx).imag / den
    return KernelEval(float(xr), float(yr), N, MPReal(v, bits))


def kernel_diag(x, basis: ArcPolyBasis, N: int) -> MPReal:
    """K_N(x, x) = sum_{k<N} |Pi_k(e^{i pi x / T})|^2 (always positive)."""
    if N > basis.max_degree:
        raise ValueError("basis degree too low for requested N")
    bits = basis.precision_bits
    with raw_precision(bits):
        xr = mpfr(_raw_of(x))
        theta = gmpy2.const_pi() * xr / basis.T_raw
        s, c = gmpy2.sin_cos(theta)
        z = mpc(c, s)
        total = mpfr(0)
        for k in range(N):
            v = basis.eval_raw(k, z)
            total += v.real * v.real + v.imag * v.imag
    return MPReal(total, bits)


def bessel_j(nu: int, t: float) -> float:
    """Bessel J_0/J_1 to double accuracy: power series for t <= 12, the
    Hankel large-argument expansion beyond."""
    if nu not in (0, 1):
        raise ValueError("nu must be 0 or 1")
    t = float(t)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t <= 12.0:
        q = -0.25 * t * t
        if nu == 0:
            term, total = 1.0, 1.0
            for m in range(1, 60):
                term *= q / (m * m)
                total += term
                if abs(term) < 1e-19 * max(1.0, abs(total)):
                    break
            return total
        term, total = 0.5 * t, 0.5 * t
        for m in range(1, 60):
            term *= q / (m * (m + 1))
            total += term
            if abs(term) < 1e-19 * max(1.0, abs(total)):
                break
        return total
    mu = 4.0 * nu * nu
    inv8t = 1.0 / (8.0 * t)
    p, q = 1.0, 0.0
    term, prev = 1.0, math.inf
    for k in range(1, 40):
        term *= (mu - (2 * k - 1) ** 2) * inv8t / k
        if abs(term) >= prev:  # divergent tail reached, stop at the smallest term
            break
        prev = abs(term)
        if k % 2 == 1:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += term if (k // 2) % 2 == 0 else -term
        if prev < 1e-20:
            break
    omega = t - 0.5 * nu * math.pi - 0.25 * math.pi
    return math.sqrt(2.0 / (math.pi * t)) * (p * math.cos(omega) - q * math.sin(omega))


@dataclass(frozen=True)
class AsymEval:
    """One asymptotic-formula sample with its auxiliary variables."""

    x: float
    N: int
    regime: str  # "bulk" | "edge"
    value: complex
    eta: float
    tau: float
    gamma: float
    alpha: float


def _asym_common(x: float, T: float):
    gamma = math.sin(math.pi / (2 * T))
    alpha = math.pi - math.pi / T
    arg = math.sin(x * math.pi / (2 * T)) / gamma
    eta = math.acos(min(1.0, max(-1.0, arg)))
    return gamma, alpha, eta


def asym_bulk(x, N: int, T) -> AsymEval:
    """Interior asymptotic value of Pi_N(e^{i pi x / T}); error O(1/N).

    The validation window is |x| <= 1 - REGIME_DELTA, extended by half a
    band so it overlaps the edge window on [1 - 1.5 delta, 1 - delta/2];
    negative x uses the conjugation relation of the real-coefficient
    polynomials.
    """
    x = float(x)
    T = float(T)
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    if abs(x) > 1 - REGIME_DELTA / 2 + 1e-15:
        raise OutOfRegime(f"bulk window is |x| <= {1 - REGIME_DELTA / 2}")
    if x < 0:
        ev = asym_bulk(-x, N, T)
        return AsymEval(x, N, "bulk", ev.value.conjugate(), ev.eta, ev.tau, ev.gamma, ev.alpha)
    gamma, alpha, eta = _asym_common(x, T)
    ratio = math.sin((1 + x) * math.pi / (2 * T)) / math.sin((1 - x) * math.pi / (2 * T))
    c0 = 1.0 / math.sqrt(2 * T * gamma)
    phase = (1j) ** (N % 4) * cmath.exp(1j * math.pi * N * x / (2 * T)) * c0
    quarter = cmath.exp(-1j * math.pi / (4 * T))
    a = N * eta - math.pi / 4
    value = phase * (
        quarter * ratio**0.25 * math.cos(a)
        - quarter.conjugate() * ratio**-0.25 * math.sin(a)
    )
    return AsymEval(x, N, "bulk", value, eta, math.pi - eta, gamma, alpha)


def asym_edge(x, N: int, T) -> AsymEval:
    """Right-endpoint asymptotic value of Pi_N(e^{i pi x / T}); error O(N^{-1/2}).

    The validation window is 1 - REGIME_DELTA <= |x| <= 1, extended by half
    a band toward the interior so it overlaps the bulk window; negative x
    uses conjugation.  At x = 1 the product (eta^2 * ratio)^{1/4} is
    replaced by its limit sqrt(2 cos(pi / 2T)) and the J_1 term vanishes.
    """
    x = float(x)
    T = float(T)
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    if abs(x) < 1 - 1.5 * REGIME_DELTA - 1e-15 or abs(x) > 1 + 1e-15:
        raise OutOfRegime(f"edge window is {1 - 1.5 * REGIME_DELTA} <= |x| <= 1")
    if x < 0:
        ev = asym_edge(-x, N, T)
        return AsymEval(x, N, "edge", ev.value.conjugate(), ev.eta, ev.tau, ev.gamma, ev.alpha)
    gamma, alpha, eta = _asym_common(x, T)
    c0 = 1.0 / math.sqrt(2 * T * gamma)
    phase = (1j) ** (N % 4) * cmath.exp(1j * math.pi * N * x / (2 * T)) * c0
    quarter = cmath.exp(-1j * math.pi / (4 * T))
    s_minus = math.sin((1 - x) * math.pi / (2 * T))
    if s_minus == 0.0:
        bounded = math.sqrt(2 * math.cos(math.pi / (2 * T)))
        j1_term = 0.0
    else:
        ratio = math.sin((1 + x) * math.pi / (2 * T)) / s_minus
        bounded = (eta * eta * ratio) ** 0.25
        j1_term = math.sqrt(math.pi * N * eta / 2) * ratio**-0.25 * bessel_j(1, N * eta)
    j0_term = math.sqrt(math.pi * N / 2) * bounded * bessel_j(0, N * eta)
    value = phase * (quarter * j0_term - quarter.conjugate() * j1_term)
    return AsymEval(x, N, "edge", value, eta, math.pi - eta, gamma, alpha)


def arc_tau(theta: float, alpha: float) -> float:
    """tau(theta) = arccos(cos(theta/2) / cos(alpha/2)) on the arc."""
    gamma = math.cos(alpha / 2)
    arg = math.cos(theta / 2) / gamma
    return math.acos(min(1.0, max(-1.0, arg)))


def conformal_psi(z, alpha: float, *, precision_bits: int = 128) -> MPComplex:
    """Exterior conformal map psi(z) = (z + 1 + sqrt((z-e^{ia})(z-e^{-ia}))) / (2 gamma).

    The square-root branch is fixed by |psi| >= sqrt(|z|) (the two candidate
    branches multiply to z); exactly on the arc, where the moduli tie, the
    branch with Im(psi / sqrt(z)) <= 0 is taken so that
    psi(e^{i theta}) / sqrt(e^{i theta}) = e^{-i tau(theta)}.
    Raises BranchError when the branch identity psi+ * psi- = z fails.
    """
    bits = max(int(precision_bits), MIN_PRECISION_BITS)
    with raw_precision(bits, allow_complex=True):
        zc = mpc(_raw_of(z))
        ea = mpc(gmpy2.cos(mpfr(alpha)), gmpy2.sin(mpfr(alpha)))
        gamma = gmpy2.cos(mpfr(alpha) / 2)
        root = gmpy2.sqrt((zc - ea) * (zc - ea.conjugate()))
        plus = (zc + 1 + root) / (2 * gamma)
        minus = (zc + 1 - root) / (2 * gamma)
        prod_defect = abs(plus * minus - zc)
        scale = max(mpfr(1), abs(zc))
        if prod_defect > scale * mpfr(2) ** (-bits // 2):
            raise BranchError(f"psi+ psi- = z defect {float(prod_defect):.3e}")
        mp_, mm_ = abs(plus), abs(minus)
        # points within double roundoff of the arc get the on-arc convention
        tie_tol = max(mpfr(2) ** (-bits // 4), mpfr(2) ** -48)
        tie = abs(mp_ - mm_) <= tie_tol * max(mp_, mm_)
        if not tie:
            pick = plus if mp_ > mm_ else minus
        else:
            # on the arc: normalize against sqrt(z) with arg in [0, 2pi)
            theta = gmpy2.atan2(zc.imag, zc.real)
            if theta < 0:
                theta += 2 * gmpy2.const_pi()
            hs, hc = gmpy2.sin(theta / 2), gmpy2.cos(theta / 2)
            sqrt_z = mpc(hc, hs)
            pick = plus if (plus / sqrt_z).imag <= 0 else minus
        return MPComplex(pick, bits)
