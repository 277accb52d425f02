"""Approximation-theoretic instruments for the extension operator.

Contents: the Lebesgue function Lambda(x) = int |K_N(x, y)| dy with growth
fits, plain and sqrt(1-x^2)-weighted moduli of continuity, best uniform
approximation from the trigonometric span by a Remez exchange (with a
dense-grid LP oracle as an independent cross-check), smooth periodic
extension of interval functions, and the Videnskii derivative-inequality
ratios.

The Lebesgue and Remez computations run at multiprecision (the trigonometric
system on a subinterval of its period is exponentially ill-conditioned); the
moduli, extension blending, and Bernstein ratios are double-precision
measurement instruments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .arcpoly import ArcPolyBasis, build_basis, kernel_direct_sum_raw
from .errors import DegenerateReference, ExchangeStalled, ToleranceNotMet
from .mpcore import MPReal, legendre_nodes, raw_precision
from .mpcore.linalg import solve_gauss
from .mpcore.scalars import _raw_of

LEBESGUE_MIN_PANELS_PER_N = 4
LEBESGUE_ORDER = 16
LEBESGUE_REL_TOL = 1e-8


# ---------------------------------------------------------------------------
# Lebesgue function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LebesgueRecord:
    x: float
    N: int
    value: float
    panels: int
    tolerance_achieved: float


def _eval_precision(basis: ArcPolyBasis, N: int) -> int:
    # Horner partial sums reach the largest monomial coefficient, so the
    # cancellation budget comes from the coefficients themselves
    with raw_precision(basis.precision_bits):
        top = max(abs(c) for c in basis.coefficients_raw(N))
        lost = max(0.0, float(gmpy2.log2(top))) if top > 0 else 0.0
    return max(192, int(lost) + 128)


def _kernel_slice(basis: ArcPolyBasis, N: int, x_raw: mpfr):
    """Fast y -> K_N(x, y) with the x-dependent factor precomputed."""
    bits = basis.precision_bits
    with raw_precision(bits):
        pi = gmpy2.const_pi()
        T = basis.T_raw
        theta_x = pi * x_raw / T
        s, c = gmpy2.sin_cos(theta_x)
        zx = mpc(c, s)
        hs, hc = gmpy2.sin_cos(theta_x * N / 2)
        qx = mpc(hc, -hs) * basis.eval_raw(N, zx)
        half = pi / (2 * T)
        switch = mpfr(2) ** -20

    def kernel(y_raw: mpfr) -> mpfr:
        # caller holds the precision context
        if abs(x_raw - y_raw) < switch:
            return kernel_direct_sum_raw(basis, N, x_raw, y_raw).real
        theta_y = pi * y_raw / T
        s_, c_ = gmpy2.sin_cos(theta_y)
        qy = mpc(c_, s_)
        hs_, hc_ = gmpy2.sin_cos(theta_y * N / 2)
        qy = mpc(hc_, -hs_) * basis.eval_raw(N, qy)
        return (qy.conjugate() * qx).imag / gmpy2.sin(half * (x_raw - y_raw))

    return kernel


def _kernel_zeros(kernel, x_raw, bits: int, N: int, T_raw) -> list[mpfr]:
    """Sign-change abscissae of y -> K_N(x, y) on [-1, 1] by scan + bisection.

    The kernel's zeros cluster quadratically toward y = +-1 but are close to
    equispaced in eta(y) = arccos(sin(y pi/2T)/sin(pi/2T)), so the scan grid
    is uniform in eta.
    """
    with raw_precision(bits):
        m = 8 * max(N, 2)
        pi = gmpy2.const_pi()
        gamma = gmpy2.sin(pi / (2 * T_raw))
        scale = 2 * T_raw / pi
        grid = [
            scale * gmpy2.asin(gamma * gmpy2.cos(pi * (m - i) / m)) for i in range(m + 1)
        ]
        grid[0], grid[-1] = mpfr(-1), mpfr(1)
        vals = [kernel(y) for y in grid]
        zeros: list[mpfr] = []
        target = mpfr("1e-7")
        for i in range(m):
            a, fa = grid[i], vals[i]
            b, fb = grid[i + 1], vals[i + 1]
            if fa == 0:
                zeros.append(a)
                continue
            if fa * fb >= 0:
                continue
            while b - a > target:
                mid = (a + b) / 2
                fm = kernel(mid)
                if fm == 0:
                    a = b = mid
                    break
                if fa * fm < 0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            zeros.append((a + b) / 2)
    return zeros


def lebesgue_function(
    x,
    N: int,
    T,
    basis: ArcPolyBasis | None = None,
    *,
    min_panels: int | None = None,
    order: int = LEBESGUE_ORDER,
    rel_tol: float = LEBESGUE_REL_TOL,
) -> LebesgueRecord:
    """Lambda(x) = int_{-1}^{1} |K_N(x, y)| dy by sign-aligned panel quadrature.

    Panels are aligned to the ~N sign changes of the kernel (plus a split at
    x), then subdivided to at least 4N panels of Gauss-Legendre order 16.
    The achieved tolerance is estimated against an order-raised pass;
    ToleranceNotMet is raised if it exceeds `rel_tol` after one refinement.
    """
    N = int(N)
    Tf = float(_raw_of(T))
    if basis is None:
        basis = build_basis(T, N)
    if basis.max_degree < N:
        raise ValueError("basis degree too low")
    eval_bits = _eval_precision(basis, N)
    work = basis if basis.precision_bits <= eval_bits else basis.at_precision(eval_bits)
    bits = work.precision_bits
    with raw_precision(bits):
        x_raw = mpfr(_raw_of(x))
        if abs(x_raw) > 1:
            raise ValueError("x must lie in [-1, 1]")
        kernel = _kernel_slice(work, N, x_raw)
        cuts = {mpfr(-1), mpfr(1)}
        if -1 < x_raw < 1:
            cuts.add(x_raw)
        cuts.update(_kernel_zeros(kernel, x_raw, bits, N, work.T_raw))
        boundaries = sorted(cuts)
        want = max(min_panels or LEBESGUE_MIN_PANELS_PER_N * N, 4)
        # subdivide proportionally to reach the panel budget
        widths = [float(b - a) for a, b in zip(boundaries[:-1], boundaries[1:])]
        total_w = sum(widths)
        fine: list[mpfr] = [boundaries[0]]
        for (a, b), w in zip(zip(boundaries[:-1], boundaries[1:]), widths):
            k = max(1, round(want * w / total_w))
            for j in range(1, k):
                fine.append(a + (b - a) * j / k)
            fine.append(b)
        boundaries = fine

        def integrate(q: int) -> mpfr:
            xs, ws = legendre_nodes(q, bits)
            total = mpfr(0)
            half = mpfr(1) / 2
            for a, b in zip(boundaries[:-1], boundaries[1:]):
                c0 = (a + b) * half
                h = (b - a) * half
                for t, w in zip(xs, ws):
                    total += h * w * abs(kernel(c0 + h * t))
            return total

        coarse = integrate(order)
        refined = integrate(order + 8)
        achieved = float(abs(refined - coarse) / abs(refined))
        if achieved > rel_tol:
            boundaries = [
                v
                for a, b in zip(boundaries[:-1], boundaries[1:])
                for v in (a, (a + b) / 2)
            ] + [boundaries[-1]]
            coarse = refined
            refined = integrate(order + 8)
            achieved = float(abs(refined - coarse) / abs(refined))
            if achieved > rel_tol:
                raise ToleranceNotMet(achieved, rel_tol, "Lebesgue quadrature")
    return LebesgueRecord(
        x=float(x_raw),
        N=N,
        value=float(refined),
        panels=len(boundaries) - 1,
        tolerance_achieved=achieved,
    )


@dataclass(frozen=True)
class GrowthFit:
    model: str  # "log" (interior) or "sqrt" (endpoint)
    slope: float
    intercept: float
    residual: float
    values: tuple[float, ...]
    band_ratio: float  # max/min of Lambda / model(N)


def lebesgue_growth_fit(
    x,
    N_list: Sequence[int],
    T,
    *,
    basis_cache: dict | None = None,
    records: Sequence[LebesgueRecord] | None = None,
) -> GrowthFit:
    """Least-squares fit of Lambda(x; N) against log N (interior x) or
    sqrt(N) (x = +-1), with the max/min band ratio of Lambda / model."""
    Ns = [int(n) for n in N_list]
    if len(Ns) < 4:
        raise ValueError("need at least 4 values of N")
    if records is None:
        cache = basis_cache if basis_cache is not None else {}
        recs = []
        for n in Ns:
            key = (float(_raw_of(T)), n)
            if key not in cache:
                cache[key] = build_basis(T, n)
            recs.append(lebesgue_function(x, n, T, cache[key]))
    else:
        recs = list(records)
    lam = np.array([r.value for r in recs])
    xf = float(_raw_of(x))
    model = "sqrt" if abs(abs(xf) - 1.0) < 1e-12 else "log"
    g = np.sqrt(Ns) if model == "sqrt" else np.log(Ns)
    A = np.vstack([g, np.ones_like(g)]).T
    coef, res, *_ = np.linalg.lstsq(A, lam, rcond=None)
    resid = float(np.sqrt(res[0])) if len(res) else 0.0
    ratios = lam / g
    return GrowthFit(
        model=model,
        slope=float(coef[0]),
        intercept=float(coef[1]),
        residual=resid,
        values=tuple(float(v) for v in lam),
        band_ratio=float(ratios.max() / ratios.min()),
    )


# ---------------------------------------------------------------------------
# Moduli of continuity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModulusRecord:
    deltas: tuple[float, ...]
    values: tuple[float, ...]
    weighted: bool


def _vectorized(f: Callable) -> Callable:
    def g(x: np.ndarray) -> np.ndarray:
        try:
            out = np.asarray(f(x), dtype=float)
            if out.shape == np.shape(x):
                return out
        except Exception:
            pass
        return np.vectorize(lambda t: float(f(t)))(x)

    return g


def modulus(
    f: Callable,
    delta: float,
    interval: tuple[float, float] = (-1.0, 1.0),
    grid_density: int | None = None,
) -> float:
    """Grid supremum of |f(x) - f(y)| over |x - y| < delta (a lower bound).

    The grid is refined until the value changes by less than 1% between
    successive doublings (or `grid_density` points are used directly).
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a or delta <= 0:
        raise ValueError("need a nondegenerate interval and delta > 0")
    fv = _vectorized(f)

    def at_density(g: int) -> float:
        xs = np.linspace(a, b, g)
        F = fv(xs)
        h = (b - a) / (g - 1)
        m = min(g - 1, int(delta / h))
        best = 0.0
        for k in range(1, m + 1):
            d = np.max(np.abs(F[k:] - F[:-k]))
            if d > best:
                best = d
        return best

    if grid_density is not None:
        return at_density(int(grid_density))
    g = 1025
    prev = at_density(g)
    while g < 2**16:
        g = 2 * g - 1
        cur = at_density(g)
        if prev > 0 and abs(cur - prev) <= 0.01 * cur:
            return cur
        prev = cur
    return prev


def weighted_modulus(f: Callable, delta: float, grid_density: int | None = None) -> float:
    """Grid supremum of |f(x + h) - f(x - h)| over 0 <= h < phi(x) delta with
    phi(x) = sqrt(1 - x^2); a lower bound with the same refinement rule."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    fv = _vectorized(f)

    def at_density(gx: int) -> float:
        xs = np.linspace(-1.0, 1.0, gx)
        phi = np.sqrt(np.clip(1.0 - xs * xs, 0.0, None))
        hmax = np.minimum(phi * delta, np.minimum(1.0 - xs, 1.0 + xs))
        u = np.linspace(0.0, 1.0, 65)[1:]
        H = hmax[:, None] * u[None, :]
        X = xs[:, None]
        return float(np.max(np.abs(fv(X + H) - fv(X - H))))

    if grid_density is not None:
        return at_density(int(grid_density))
    g = 513
    prev = at_density(g)
    while g < 2**14:
        g = 2 * g - 1
        cur = at_density(g)
        if prev > 0 and abs(cur - prev) <= 0.01 * cur:
            return cur
        prev = cur
    return prev


def modulus_record(f: Callable, deltas: Sequence[float], weighted: bool = False) -> ModulusRecord:
    fn = weighted_modulus if weighted else modulus
    vals = tuple(fn(f, float(d)) for d in deltas)
    return ModulusRecord(deltas=tuple(float(d) for d in deltas), values=vals, weighted=weighted)


# ---------------------------------------------------------------------------
# Remez exchange on the trigonometric span
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinimaxResult:
    """Best uniform approximation from span{1, cos(k pi x/T), sin(k pi x/T)}.

    Coefficients are ordered [a_0, a_1, b_1, ..., a_n, b_n] for
    r(x) = a_0 + sum_k a_k cos(k pi x / T) + b_k sin(k pi x / T).
    """

    E: float
    coefficients: tuple[float, ...]
    alternation_points: tuple[float, ...]
    iterations: int
    N: int
    T: float


def _map_m_inverse_float(t: float, T: float) -> float:
    c = math.cos(math.pi / T)
    u = c + (1 - c) * (t + 1) / 2
    return (T / math.pi) * math.acos(min(1.0, max(-1.0, u)))


def _initial_reference(N: int, T: float) -> list[float]:
    """Chebyshev-distributed points of the (sign-folded) mapped variable.

    N + 2 folded points are generated and the left endpoint dropped: a
    symmetric reference forces the leveled error to zero for even targets
    (sign alternation contradicts the even symmetry), so the start must be
    asymmetric.
    """
    pts = []
    for i in range(N + 2):
        u = math.cos(math.pi * (N + 1 - i) / (N + 1))  # ascending in [-1, 1]
        mag = _map_m_inverse_float(1.0 - 2.0 * abs(u), T)
        pts.append(math.copysign(mag, u) if u != 0 else 0.0)
    return pts[1:]


def _trig_row_raw(x: mpfr, n: int, T: mpfr) -> list[mpfr]:
    theta = gmpy2.const_pi() * x / T
    s1, c1 = gmpy2.sin_cos(theta)
    row = [mpfr(1)]
    ck, sk = c1, s1
    for _ in range(n):
        row.append(ck)
        row.append(sk)
        ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
    return row


def _trig_eval_many(coeffs, xs: np.ndarray, n: int, T: float) -> np.ndarray:
    theta = np.pi * xs / T
    out = np.full_like(xs, float(coeffs[0]), dtype=float)
    for k in range(1, n + 1):
        out += float(coeffs[2 * k - 1]) * np.cos(k * theta)
        out += float(coeffs[2 * k]) * np.sin(k * theta)
    return out


def remez(
    f: Callable,
    N: int,
    T,
    grid: Sequence | None = None,
    *,
    precision_bits: int | None = None,
    max_iterations: int = 80,
    level_tol: float = 1e-10,
) -> MinimaxResult:
    """Multi-point Remez exchange for E(f) over the N-dimensional trig span.

    The span is a Chebyshev system on [-1, 1] (the interval is shorter than
    half the period 2T), so the best approximation equioscillates at exactly
    N + 1 points.  The linear solves run at multiprecision; the error scan
    runs at a reduced precision chosen from the coefficient magnitude.

    Raises ExchangeStalled when the level stops improving before the
    equioscillation tolerance is met, DegenerateReference when fewer than
    N + 1 alternating extrema can be found.
    """
    N = int(N)
    if N < 1 or N % 2 == 0:
        raise ValueError("N must be odd and positive")
    n = (N - 1) // 2
    Tf = float(_raw_of(T))
    if not Tf > 1:
        raise ValueError("T must exceed 1")
    bits = int(precision_bits or max(320, 10 * N))
    scan_size = max(1025, 16 * N + 1) if grid is None else len(grid)

    with raw_precision(bits):
        T_raw = mpfr(_raw_of(T))
        if grid is None:
            base_grid = [
                mpfr(_map_m_inverse_float(math.cos(math.pi * i / (scan_size - 1)), Tf))
                for i in range(scan_size)
            ]
            base_grid = sorted(set([-g for g in base_grid] + base_grid))
        else:
            base_grid = sorted(mpfr(_raw_of(g)) for g in grid)
        reference = [mpfr(v) for v in _initial_reference(N, Tf)]
        f_base = {x: mpfr(_raw_of(f(MPReal(x, bits)))) for x in base_grid}
        f_scale = max([1e-300] + [abs(float(v)) for v in f_base.values()])

    last_level = None
    for iteration in range(1, max_iterations + 1):
        with raw_precision(bits):
            rows = []
            rhs = []
            for i, x in enumerate(reference):
                row = _trig_row_raw(x, n, T_raw)
                row.append(mpfr(-1) if i % 2 else mpfr(1))
                rows.append(row)
                rhs.append(mpfr(_raw_of(f(MPReal(x, bits)))))
            sol = solve_gauss(rows, rhs)
            coeffs = sol[:N]
            level = abs(sol[N])
            # extrema cluster between neighboring reference points, so add
            # local scan points in every reference gap (and to the walls)
            fvals = dict(f_base)
            gaps = [mpfr(-1)] + list(reference) + [mpfr(1)]
            extra: list[mpfr] = []
            for a, b in zip(gaps[:-1], gaps[1:]):
                if b - a <= 0:
                    continue
                for j in range(1, 8):
                    t = math.cos(math.pi * (8 - j) / 8)
                    extra.append(a + (b - a) * (t + 1) / 2)
            for x in list(reference) + extra:
                if x not in fvals:
                    fvals[x] = mpfr(_raw_of(f(MPReal(x, bits))))
            scan_grid = sorted(fvals.keys())
            # error scan at reduced precision tied to coefficient size
            coef_mag = max(abs(c) for c in coeffs)
            scan_bits = 128 + max(0, int(math.log2(max(1.0, float(coef_mag)))))
            scan_bits = min(scan_bits, bits)
            with raw_precision(scan_bits):
                errs = []
                for x in scan_grid:
                    row = _trig_row_raw(x, n, T_raw)
                    r = mpfr(0)
                    for c, v in zip(coeffs, row):
                        r += c * v
                    errs.append(fvals[x] - r)
            err_f = np.array([float(e) for e in errs])

            def err_at(x_new: mpfr) -> float:
                with raw_precision(scan_bits):
                    row = _trig_row_raw(x_new, n, T_raw)
                    r = mpfr(0)
                    for c, v in zip(coeffs, row):
                        r += c * v
                    return float(mpfr(_raw_of(f(MPReal(x_new, bits)))) - r)

        # one candidate per maximal sign run: the in-run argmax of |e|
        # (a plain local-max scan misses low-amplitude runs squeezed between
        # large lobes, e.g. the notch at an even target's kink)
        cand_idx: list[int] = []
        cur_sign = 0
        best = -1
        for i, v in enumerate(err_f):
            s = 1 if v > 0 else (-1 if v < 0 else 0)
            if s == 0:
                continue
            if s != cur_sign:
                if best >= 0:
                    cand_idx.append(best)
                cur_sign = s
                best = i
            elif abs(v) > abs(err_f[best]):
                best = i
        if best >= 0:
            cand_idx.append(best)
        # sharpen each candidate with one parabolic step through its neighbors
        refined: dict[int, tuple[float, float]] = {}
        xs_f = [float(g) for g in scan_grid]
        for i in cand_idx:
            x_i, v_i = xs_f[i], err_f[i]
            if 0 < i < len(err_f) - 1:
                x0, x1, x2 = xs_f[i - 1], x_i, xs_f[i + 1]
                y0, y1, y2 = err_f[i - 1], v_i, err_f[i + 1]
                d1 = (y1 - y0) / (x1 - x0)
                d2 = (y2 - y1) / (x2 - x1)
                curv = (d2 - d1) / (x2 - x0)
                if curv != 0:
                    xv = 0.5 * (x0 + x1 - d1 / curv)
                    if x0 < xv < x2 and abs(xv - x1) > 1e-300:
                        with raw_precision(bits):
                            ev = err_at(mpfr(xv))
                        if abs(ev) > abs(v_i) and np.sign(ev) == np.sign(v_i):
                            x_i, v_i = xv, ev
            refined[i] = (x_i, v_i)
        # one representative per sign run
        cands: list[tuple[float, float]] = []  # (x, err)
        for i in cand_idx:
            x_i, v = refined[i]
            if v == 0:
                continue
            if cands and np.sign(cands[-1][1]) == np.sign(v):
                if abs(v) > abs(cands[-1][1]):
                    cands[-1] = (x_i, v)
            else:
                cands.append((x_i, v))
        if len(cands) < N + 1:
            raise DegenerateReference(
                f"only {len(cands)} alternating extrema (need {N + 1}) at iteration {iteration}"
            )
        while len(cands) > N + 1:
            mags = [abs(e) for _, e in cands]
            if mags[0] <= mags[-1]:
                cands.pop(0)
            else:
                cands.pop()
        sup_err = max(abs(e) for _, e in cands)
        gap = abs(sup_err - float(level)) / max(sup_err, 1e-300)
        # a target already inside the span bottoms out at roundoff noise
        at_floor = sup_err <= 1e-14 * f_scale
        if gap <= level_tol or at_floor:
            with raw_precision(bits):
                alt = tuple(float(x) for x, _ in cands)
                return MinimaxResult(
                    E=sup_err if at_floor else float(level),
                    coefficients=tuple(float(c) for c in coeffs),
                    alternation_points=alt,
                    iterations=iteration,
                    N=N,
                    T=Tf,
                )
        if (
            iteration > 3
            and last_level is not None
            and float(level) < last_level * (1 - 1e-12)
            and gap > 0.5
        ):
            raise ExchangeStalled(f"level regressed at iteration {iteration}")
        last_level = float(level)
        with raw_precision(bits):
            reference = [mpfr(x) for x, _ in cands]
    raise ExchangeStalled(f"no convergence in {max_iterations} iterations (gap {gap:.2e})")


def minimax_lp_oracle(f: Callable, N: int, T, grid_size: int = 2001) -> float:
    """Dense-grid LP lower bound for E(f): minimize s subject to
    |f(x_i) - r(x_i)| <= s on a uniform grid (independent of the exchange)."""
    from scipy.optimize import linprog

    N = int(N)
    n = (N - 1) // 2
    Tf = float(_raw_of(T))
    xs = np.linspace(-1.0, 1.0, int(grid_size))
    theta = np.pi * xs / Tf
    cols = [np.ones_like(xs)]
    for k in range(1, n + 1):
        cols.append(np.cos(k * theta))
        cols.append(np.sin(k * theta))
    B = np.vstack(cols).T  # (grid, N)
    fx = np.array([float(_raw_of(f(MPReal(float(x), 64)))) for x in xs])
    # variables: coefficients (N) then s
    G = np.block([[B, -np.ones((len(xs), 1))], [-B, -np.ones((len(xs), 1))]])
    h = np.concatenate([fx, -fx])
    c = np.zeros(N + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=G, b_ub=h, bounds=[(None, None)] * N + [(0, None)], method="highs")
    if not res.success:
        raise RuntimeError(f"LP oracle failed: {res.message}")
    return float(res.x[-1])


# ---------------------------------------------------------------------------
# Periodic extension
# ---------------------------------------------------------------------------


def _one_sided_derivatives(f: Callable, x0: float, k: int, into: float) -> list[float]:
    """f(x0), f'(x0), ..., f^(k)(x0) by one-sided polynomial fitting."""
    if k == 0:
        return [float(f(x0))]
    h = 1e-3
    m = k + 4
    xs = np.array([x0 + into * h * i for i in range(m + 1)])
    ys = np.array([float(f(float(x))) for x in xs])
    # fit in the scaled variable to keep the Vandermonde well conditioned
    t = (xs - x0) / h
    coef = np.polynomial.polynomial.polyfit(t, ys, deg=k + 2)
    out = []
    fact = 1.0
    for j in range(k + 1):
        if j > 0:
            fact *= j
        out.append(float(coef[j]) * fact / h**j)
    return out


def _hermite_coefficients(left: Sequence[float], right: Sequence[float], L: float) -> np.ndarray:
    """Polynomial (coefficient-ascending) on [0, L] matching derivatives
    0..k at both ends: the two-point Hermite interpolant of degree 2k + 1."""
    k = len(left) - 1
    dof = 2 * (k + 1)
    A = np.zeros((dof, dof))
    b = np.zeros(dof)
    for j in range(k + 1):
        for p in range(j, dof):
            fall = math.perm(p, j)
            A[j, p] = fall if p == j else 0.0  # at 0 only the p=j term survives
            A[k + 1 + j, p] = fall * L ** (p - j)
        b[j] = left[j]
        b[k + 1 + j] = right[j]
    return np.linalg.solve(A, b)


def periodic_extension(
    f: Callable,
    k: int,
    T,
    *,
    derivatives: tuple[Sequence[float], Sequence[float]] | None = None,
) -> Callable[[float], float]:
    """Extend f from [-1, 1] to a C^k periodic function on [-T, T].

    For k = 0 the gap [1, 2T - 1] (reaching -1 periodically) is a linear
    blend between f(1) and f(-1); for k > 0 it is the two-point Hermite
    interpolant matching derivatives up to order k at both seam ends
    (2(k + 1) coefficients).  Derivatives default to one-sided numerical
    estimates; pass `derivatives=(at_plus1, at_minus1)` to override.
    """
    k = int(k)
    Tf = float(_raw_of(T))
    L = 2 * Tf - 2
    if derivatives is not None:
        left, right = [list(map(float, d)) for d in derivatives]
        if len(left) < k + 1 or len(right) < k + 1:
            raise ValueError("need derivatives up to order k at both ends")
    else:
        left = _one_sided_derivatives(f, 1.0, k, into=-1.0)
        right = _one_sided_derivatives(f, -1.0, k, into=+1.0)
    if k == 0:
        c0, c1 = left[0], (right[0] - left[0]) / L
        blend = lambda u: c0 + c1 * u  # noqa: E731
    else:
        coef = _hermite_coefficients(left[: k + 1], right[: k + 1], L)
        blend = lambda u: float(np.polynomial.polynomial.polyval(u, coef))  # noqa: E731

    def g(x: float) -> float:
        y = math.fmod(float(x) + Tf, 2 * Tf)
        if y < 0:
            y += 2 * Tf
        y -= Tf  # now in [-T, T)
        if -1.0 <= y <= 1.0:
            return float(f(y))
        u = y - 1.0 if y > 1.0 else y + 2 * Tf - 1.0
        return float(blend(u))

    return g


# ---------------------------------------------------------------------------
# Bernstein (Videnskii) inequality ratios
# ---------------------------------------------------------------------------


def videnskii_weight(x: np.ndarray, T: float) -> np.ndarray:
    """phi(x) = sqrt(sin((1-x)pi/2T) sin((1+x)pi/2T)) / cos(x pi/2T)."""
    x = np.asarray(x, dtype=float)
    a = np.sin((1 - x) * np.pi / (2 * T))
    b = np.sin((1 + x) * np.pi / (2 * T))
    return np.sqrt(np.clip(a * b, 0.0, None)) / np.cos(x * np.pi / (2 * T))


@dataclass(frozen=True)
class BernsteinCheck:
    videnskii_ratio: float
    videnskii_bound: float
    relaxed_ratio: float
    relaxed_bound: float


def bernstein_check(r, grid: Sequence | None = None, *, T: float | None = None) -> BernsteinCheck:
    """Ratios ||phi r'|| / (n ||r||) for the Videnskii weight (bound pi/T)
    and the sqrt(1 - x^2) weight (bound pi / (T sin(pi/2T))), on a grid.

    `r` is either a fourext.Extension or a complex coefficient array indexed
    k = -n..n (with `T` supplied).  Runs in double precision: it measures
    bounded trigonometric sums, no ill-conditioned solve is involved.
    """
    if hasattr(r, "coefficients_raw"):
        coeffs = np.array([complex(c) for c in r.coefficients_raw()])
        Tf = float(r.T_raw)
    else:
        coeffs = np.asarray(r, dtype=complex)
        if T is None:
            raise ValueError("T required with a bare coefficient array")
        Tf = float(T)
    N = len(coeffs)
    if N % 2 == 0:
        raise ValueError("coefficient count must be odd")
    n = (N - 1) // 2
    if n == 0:
        raise ValueError("need n >= 1 for a derivative ratio")
    xs = np.linspace(-1.0, 1.0, 2001) if grid is None else np.asarray(grid, dtype=float)
    ks = np.arange(-n, n + 1)
    E = np.exp(1j * np.pi * np.outer(xs, ks) / Tf)
    rv = E @ coeffs
    dv = E @ (coeffs * (1j * np.pi * ks / Tf))
    r_inf = np.max(np.abs(rv))
    phi = videnskii_weight(xs, Tf)
    sq = np.sqrt(np.clip(1.0 - xs * xs, 0.0, None))
    ratio_v = float(np.max(phi * np.abs(dv)) / (n * r_inf))
    ratio_r = float(np.max(sq * np.abs(dv)) / (n * r_inf))
    return BernsteinCheck(
        videnskii_ratio=ratio_v,
        videnskii_bound=math.pi / Tf,
        relaxed_ratio=ratio_r,
        relaxed_bound=math.pi / (Tf * math.sin(math.pi / (2 * Tf))),
    )
