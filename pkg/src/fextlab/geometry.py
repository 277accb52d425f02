"""Convergence geometry: the cosine change of variables m(x), Bernstein
ellipses, their m-preimages, and predicted exponential rates.

For a target analytic inside the mapped ellipse D(rho) the uniform error of
the degree-n extension decays like rho^{-n}, with rho capped at
cot^2(pi / 4T) regardless of how large the analyticity region is.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import RootNotFound

CONTOUR_TOL = 1e-10


def map_m(x: float, T: float) -> float:
    """m(x) = 2 (cos(pi x / T) - cos(pi / T)) / (1 - cos(pi / T)) - 1."""
    c = math.cos(math.pi / float(T))
    return 2.0 * (math.cos(math.pi * float(x) / float(T)) - c) / (1.0 - c) - 1.0


def map_m_complex(z: complex, T: float) -> complex:
    c = math.cos(math.pi / float(T))
    return 2.0 * (cmath.cos(cmath.pi * complex(z) / float(T)) - c) / (1.0 - c) - 1.0


def bernstein_param(t: complex) -> float:
    """Ellipse parameter of the Bernstein ellipse through t: the inverse
    Joukowski branch with rho >= 1; points of [-1, 1] return 1."""
    t = complex(t)
    if t.imag == 0 and -1.0 <= t.real <= 1.0:
        return 1.0
    root = cmath.sqrt(t * t - 1.0)
    rho = max(abs(t + root), abs(t - root))
    return rho if rho > 1.0 else 1.0


def rate_cap(T: float) -> float:
    """T-dependent ceiling cot^2(pi / 4T) on the exponential rate."""
    return 1.0 / math.tan(math.pi / (4.0 * float(T))) ** 2


def predicted_rate(singularity: complex | str, T: float) -> float:
    """Predicted per-n error decay ratio rho for a target with the given
    nearest singularity ("entire" for none): min(rho*(m(z0)), cot^2(pi/4T))."""
    cap = rate_cap(T)
    if isinstance(singularity, str):
        if singularity != "entire":
            raise ValueError("singularity must be a complex point or 'entire'")
        return cap
    z0 = complex(singularity)
    if z0.imag == 0 and -1.0 <= z0.real <= 1.0:
        raise ValueError("singularity lies on the approximation interval")
    return min(bernstein_param(map_m_complex(z0, T)), cap)


@dataclass(frozen=True)
class MappedEllipse:
    """Sampled m-preimage of a Bernstein ellipse: a closed contour around
    [-1, 1], symmetric under conjugation."""

    rho: float
    T: float
    points: tuple[complex, ...]

    def max_map_defect(self) -> float:
        """max_j |m(z_j) - B(rho) target_j| over the sampled contour."""
        worst = 0.0
        m = len(self.points)
        for j, z in enumerate(self.points):
            theta = 2.0 * math.pi * j / m
            target = 0.5 * (self.rho * cmath.exp(1j * theta) + cmath.exp(-1j * theta) / self.rho)
            worst = max(worst, abs(map_m_complex(z, self.T) - target))
        return worst


def _invert_m(w: complex, T: float, near: complex | None) -> complex:
    """Solve m(z) = w through the explicit arccos branch, choosing the
    candidate continuous with `near`, then polishing by a secant step."""
    c = math.cos(math.pi / T)
    u = c + (1.0 - c) * (w + 1.0) / 2.0
    base = (T / math.pi) * cmath.acos(u)
    cands = [base, -base, base.conjugate(), -base.conjugate()]
    if near is None:
        z = cands[0]
    else:
        z = min(cands, key=lambda s: abs(s - near))
    # secant polish against roundoff in the branch composition
    fz = map_m_complex(z, T) - w
    if abs(fz) > CONTOUR_TOL:
        h = 1e-7 * (1.0 + abs(z))
        for _ in range(60):
            fzh = map_m_complex(z + h, T) - w
            denom = fzh - fz
            if denom == 0:
                break
            z_next = z - fz * h / denom
            h = z_next - z
            z = z_next
            fz = map_m_complex(z, T) - w
            if abs(fz) <= CONTOUR_TOL:
                break
        if abs(fz) > CONTOUR_TOL:
            raise RootNotFound(f"m-inversion stalled at |residual| = {abs(fz):.3e}")
    return z


def mapped_ellipse_contour(rho: float, T: float, samples: int = 256) -> MappedEllipse:
    """Sample the closed contour m^{-1}(B(rho)) by branch-tracked inversion.

    Valid for 1 < rho < cot^2(pi / 4T); each returned point satisfies
    |m(z) - target| < 1e-10 or RootNotFound is raised.
    """
    rho = float(rho)
    T = float(T)
    if not 1.0 < rho < rate_cap(T):
        raise ValueError("rho must lie in (1, cot^2(pi/4T))")
    if samples < 8:
        raise ValueError("need at least 8 samples")
    pts: list[complex] = []
    prev: complex | None = None
    for j in range(samples):
        theta = 2.0 * math.pi * j / samples
        w = 0.5 * (rho * cmath.exp(1j * theta) + cmath.exp(-1j * theta) / rho)
        z = _invert_m(w, T, prev)
        pts.append(z)
        prev = z
    return MappedEllipse(rho=rho, T=T, points=tuple(pts))


def fit_exponential_rate(n_values: Sequence[int], errors: Sequence[float]) -> float:
    """Fitted per-n decay ratio rho from least squares on log(error) vs n,
    restricted to the pre-plateau range (errors above 10x the final plateau)."""
    import numpy as np

    ns = np.asarray(n_values, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if len(ns) != len(errs) or len(ns) < 2:
        raise ValueError("need matching n and error sequences, at least 2 points")
    positive = errs > 0
    plateau = errs[positive].min() if positive.any() else 0.0
    mask = positive & (errs > 10.0 * plateau)
    if mask.sum() < 2:
        mask = positive
    A = np.vstack([ns[mask], np.ones(mask.sum())]).T
    slope, _ = np.linalg.lstsq(A, np.log(errs[mask]), rcond=None)[0]
    return float(math.exp(-slope))


def fit_algebraic_rate(N_values: Sequence[int], errors: Sequence[float]) -> float:
    """Fitted slope of log(error) against log(N) over the pre-plateau range."""
    import numpy as np

    ns = np.asarray(N_values, dtype=float)
    errs = np.asarray(errors, dtype=float)
    positive = errs > 0
    plateau = errs[positive].min() if positive.any() else 0.0
    mask = positive & (errs > 10.0 * plateau)
    if mask.sum() < 3:
        mask = positive
    A = np.vstack([np.log(ns[mask]), np.ones(int(mask.sum()))]).T
    slope, _ = np.linalg.lstsq(A, np.log(errs[mask]), rcond=None)[0]
    return float(slope)
