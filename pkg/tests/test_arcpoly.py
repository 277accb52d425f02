"""Arc polynomials: moments, basis, kernel, Bessel, asymptotics, conformal map."""

import cmath
import math
import random

import gmpy2
import numpy as np
import pytest
from gmpy2 import mpc, mpfr

from fextlab.arcpoly import (
    arc_tau,
    asym_bulk,
    asym_edge,
    bessel_j,
    build_basis,
    cd_kernel,
    conformal_psi,
    kernel_diag,
    kernel_direct_sum_raw,
    moments,
    reflected,
)
from fextlab.errors import OutOfRegime
from fextlab.fourext import build_gram
from fextlab.mpcore import MPComplex, MPReal, legendre_nodes, raw_precision
from fextlab.mpcore.scalars import _raw_of


@pytest.fixture(scope="module")
def basis_T2():
    return build_basis(2, 24)


# -- moments -------------------------------------------------------------------


def test_moment_zero_is_two():
    assert float(moments(2, 0)) == 2.0
    assert float(moments("2.43", 0)) == 2.0


def test_moments_T2():
    assert abs(float(moments(2, 2))) < 1e-70  # 2 sinc(pi) = 0
    assert abs(float(moments(2, 1)) - 4 / math.pi) < 1e-16
    assert float(moments(2, -1)) == float(moments(2, 1))


def test_moment_matrix_is_twice_gram(basis_T2):
    G = build_gram(2, 9, precision_bits=256)
    with raw_precision(256):
        for j in range(9):
            mu = moments(2, j, precision_bits=256)
            assert float(abs(mu.value - 2 * G.entry_raw(0, j))) < 2.0 ** -240


# -- basis ----------------------------------------------------------------------


def test_pi0_is_inverse_sqrt_two(basis_T2):
    c = basis_T2.coefficients(0)
    with raw_precision(basis_T2.precision_bits):
        dev = abs(c[0].value - 1 / gmpy2.sqrt(mpfr(2)))
        assert float(dev) < 1e-40


def test_T1_basis_is_scaled_monomials():
    b = build_basis(1, 6, 256)
    with raw_precision(256):
        inv_sqrt2 = 1 / gmpy2.sqrt(mpfr(2))
        for k in range(7):
            coeffs = b.coefficients_raw(k)
            assert float(abs(coeffs[-1] - inv_sqrt2)) < 1e-40
            assert all(abs(float(c)) < 1e-40 for c in coeffs[:-1])


def test_leading_coefficients_positive(basis_T2):
    for k in range(basis_T2.max_degree + 1):
        assert float(basis_T2.leading_coefficient(k)) > 0


def test_orthonormality_against_quadrature_oracle():
    # Gram of the computed basis via quadrature over the arc must be I
    M = 8
    bits = 320
    b = build_basis(2, M, bits)
    with raw_precision(bits):
        T = mpfr(2)
        pi = gmpy2.const_pi()
        lo, hi = -pi / T, pi / T
        xs, ws = legendre_nodes(48, bits)
        half = (hi - lo) / 2
        mid = (hi + lo) / 2
        worst = mpfr(0)
        vals = []
        for t, w in zip(xs, ws):
            theta = mid + half * t
            s, c = gmpy2.sin_cos(theta)
            z = mpc(c, s)
            vals.append((w * half, [b.eval_raw(k, z) for k in range(M + 1)]))
        for j in range(M + 1):
            for k in range(j + 1):
                acc = mpc(0)
                for w, row in vals:
                    acc += w * row[j].conjugate() * row[k]
                acc = acc * (2 * T) / (2 * pi)
                target = 1 if j == k else 0
                dev = abs(acc - target)
                if dev > worst:
                    worst = dev
        assert float(worst) < 2.0 ** (-0.5 * bits)


def test_basis_at_precision_rounds():
    b = build_basis(2, 4, 512)
    small = b.at_precision(128)
    assert small.precision_bits == 128
    assert abs(float(small.coefficients(3)[2]) - float(b.coefficients(3)[2])) < 1e-30


# -- reflected -------------------------------------------------------------------


def test_reflected_constant():
    out = reflected([MPReal(1 / math.sqrt(2), 128)])
    assert abs(complex(out[0]) - 1 / math.sqrt(2)) < 1e-30


def test_reflected_reverses_and_conjugates():
    coeffs = [MPComplex(1, 128, imag=2), MPComplex(3, 128, imag=-1), MPComplex(0, 128, imag=5)]
    out = reflected(coeffs)
    assert complex(out[0]) == complex(0, -5)
    assert complex(out[1]) == complex(3, 1)
    assert complex(out[2]) == complex(1, -2)


def test_reflected_is_involution():
    rng = random.Random(4)
    coeffs = [MPComplex(rng.uniform(-1, 1), 192, imag=rng.uniform(-1, 1)) for _ in range(4)]
    twice = reflected(reflected(coeffs))
    for a, b in zip(coeffs, twice):
        assert complex(a) == complex(b)


# -- kernel ----------------------------------------------------------------------


def test_kernel_T1_is_scaled_dirichlet():
    N = 31
    b = build_basis(1, N, 128)
    with raw_precision(192):
        for x, y in ((0.37, -0.22), (0.9, 0.1), (-0.6, 0.61)):
            kv = cd_kernel(x, y, b, N)
            u = mpfr(x) - mpfr(y)
            pi = gmpy2.const_pi()
            expected = gmpy2.sin(N * pi * u / 2) / (2 * gmpy2.sin(pi * u / 2))
            assert float(abs(kv.value.value - expected)) < 1e-25


def test_kernel_T1_diagonal_N_half():
    N = 31
    b = build_basis(1, N, 128)
    assert abs(float(kernel_diag(0.3, b, N)) - N / 2) < 1e-25
    kv = cd_kernel(0.5, 0.5, b, N)  # near-diagonal switch path
    assert abs(float(kv.value) - N / 2) < 1e-25


def test_kernel_closed_form_matches_direct_sum(basis_T2):
    rng = random.Random(7)
    N = 21
    bound = 2.0 ** (-0.5 * basis_T2.precision_bits)
    for _ in range(25):
        x, y = rng.uniform(-1, 1), rng.uniform(-1, 1)
        kv = cd_kernel(x, y, basis_T2, N)
        with raw_precision(basis_T2.precision_bits):
            dv = kernel_direct_sum_raw(basis_T2, N, x, y)
            rel = float(abs(kv.value.value - dv.real) / max(mpfr(1) / 10**6, abs(dv.real)))
        assert rel < bound


def test_kernel_hermitian_symmetric(basis_T2):
    kv1 = cd_kernel(0.4, -0.7, basis_T2, 21)
    kv2 = cd_kernel(-0.7, 0.4, basis_T2, 21)
    assert abs(float(kv1.value) - float(kv2.value)) < 1e-60


def test_kernel_diag_positive_and_trace(basis_T2):
    # int_{-1}^{1} K_N(x, x) dx = N by orthonormality
    N = 9
    bits = basis_T2.precision_bits
    with raw_precision(bits):
        xs, ws = legendre_nodes(64, bits)
        total = mpfr(0)
        for t, w in zip(xs, ws):
            total += w * kernel_diag(t, basis_T2, N).value
        assert abs(float(total - N)) < 1e-30


def test_kernel_l2_row_equals_diagonal(basis_T2):
    # int |K_N(1, y)|^2 dy = K_N(1, 1)
    N = 21
    bits = basis_T2.precision_bits
    diag = kernel_diag(1.0, basis_T2, N)
    with raw_precision(bits):
        total = mpfr(0)
        xs, ws = legendre_nodes(48, bits)
        panels = 3 * N
        for p in range(panels):
            a = mpfr(-1) + mpfr(2) * p / panels
            b = mpfr(-1) + mpfr(2) * (p + 1) / panels
            mid, half = (a + b) / 2, (b - a) / 2
            for t, w in zip(xs, ws):
                v = cd_kernel(1.0, mid + half * t, basis_T2, N).value.value
                total += half * w * v * v
    assert abs(float(total) - float(diag)) < 1e-10


def test_kernel_reproduces_span_elements(basis_T2):
    # int K_N(x, y) r(y) dy = r(x) for r in the N-dimensional span
    from fextlab.fourext import Extension

    rng = random.Random(9)
    N = 11
    n = 5
    bits = basis_T2.precision_bits
    coeffs = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(N)]
    r = Extension(coeffs, 2, bits)
    with raw_precision(bits):
        for x in (-0.8, 0.05, 0.61):
            xs, ws = legendre_nodes(48, bits)
            panels = 3 * N
            acc = mpc(0)
            for p in range(panels):
                a = mpfr(-1) + mpfr(2) * p / panels
                b = mpfr(-1) + mpfr(2) * (p + 1) / panels
                mid, half = (a + b) / 2, (b - a) / 2
                for t, w in zip(xs, ws):
                    y = mid + half * t
                    acc += half * w * cd_kernel(x, y, basis_T2, N).value.value * r.evaluate_raw(y)
            assert float(abs(acc - r.evaluate_raw(mpfr(repr(x))))) < 1e-10


def test_cd_identity_off_the_circle(basis_T2):
    # sum_{k<N} conj(Pi_k(zeta)) Pi_k(z) (1 - conj(zeta) z)
    #   = conj(Pi*_N(zeta)) Pi*_N(z) - conj(Pi_N(zeta)) Pi_N(z)
    rng = random.Random(13)
    N = 11
    bits = basis_T2.precision_bits
    refl = [
        [_raw_of(c) for c in reflected(basis_T2.coefficients(N))],
    ]
    with raw_precision(bits):
        star = refl[0]

        def eval_poly(row, z):
            acc = mpc(0)
            for c in reversed(row):
                acc = acc * z + c
            return acc

        # Pi*_N has full length N+1 (reversal of Pi_N's coefficients)
        for _ in range(6):
            z = mpc(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
            zeta = mpc(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
            lhs = mpc(0)
            for k in range(N):
                lhs += basis_T2.eval_raw(k, zeta).conjugate() * basis_T2.eval_raw(k, z)
            lhs *= 1 - zeta.conjugate() * z
            rhs = eval_poly(star, zeta).conjugate() * eval_poly(star, z)
            rhs -= basis_T2.eval_raw(N, zeta).conjugate() * basis_T2.eval_raw(N, z)
            assert float(abs(lhs - rhs)) < 2.0 ** (-0.4 * bits)


# -- Bessel ----------------------------------------------------------------------


def test_bessel_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_bessel_bounded_by_one():
    for t in np.linspace(0.0, 100.0, 2001):
        assert abs(bessel_j(0, float(t))) <= 1.0
        assert abs(bessel_j(1, float(t))) <= 1.0


def test_bessel_first_zero_of_j0():
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-10


def test_bessel_against_scipy_oracle():
    from scipy.special import j0, j1

    worst = 0.0
    for t in np.linspace(0.0, 400.0, 1601):
        worst = max(worst, abs(bessel_j(0, float(t)) - j0(t)), abs(bessel_j(1, float(t)) - j1(t)))
    assert worst < 5e-10


def test_bessel_rejects_bad_input():
    with pytest.raises(ValueError):
        bessel_j(2, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, -1.0)


# -- asymptotics ------------------------------------------------------------------


def test_eta_values():
    ev = asym_edge(1.0, 16, 2.0)
    assert ev.eta == 0.0
    ev0 = asym_bulk(0.0, 16, 2.0)
    assert abs(ev0.eta - math.pi / 2) < 1e-14


def test_edge_collapses_at_right_endpoint():
    # at x=1: eta=0 so J0(0)=1 carries everything and the J1 term vanishes
    T = 2.0
    N = 32
    ev = asym_edge(1.0, N, T)
    gamma = math.sin(math.pi / (2 * T))
    expected_mag = (
        math.sqrt(math.pi * N / 2)
        * math.sqrt(2 * math.cos(math.pi / (2 * T)))
        / math.sqrt(2 * T * gamma)
    )
    assert abs(abs(ev.value) - expected_mag) < 1e-12


def test_bulk_deviation_decays_like_inverse_N(basis_T2):
    basis = build_basis(2, 128)
    devs = []
    for N in (16, 32, 64, 128):
        exact = complex(basis.eval_on_arc_raw(N, 0.3))
        devs.append(abs(exact - asym_bulk(0.3, N, 2.0).value))
    logs = np.log(devs)
    slope = np.linalg.lstsq(
        np.vstack([np.log([16, 32, 64, 128]), np.ones(4)]).T, logs, rcond=None
    )[0][0]
    assert -1.3 <= slope <= -0.7


def test_asym_regime_windows():
    with pytest.raises(OutOfRegime):
        asym_bulk(0.95, 16, 2.0)
    with pytest.raises(OutOfRegime):
        asym_edge(0.5, 16, 2.0)
    with pytest.raises(OutOfRegime):
        asym_edge(1.2, 16, 2.0)


def test_asym_conjugation_for_negative_x():
    for fn, x in ((asym_bulk, -0.3), (asym_edge, -0.95)):
        ev_neg = fn(x, 32, 2.0)
        ev_pos = fn(-x, 32, 2.0)
        assert abs(ev_neg.value - ev_pos.value.conjugate()) < 1e-14


def test_bulk_and_edge_agree_on_overlap():
    # both formulas approximate the same polynomial on [1-0.3, 1-0.1];
    # their gap must sit within the combined O(N^{-1/2}) error band
    N = 64
    for x in (0.72, 0.78, 0.85):
        b = asym_bulk(x, N, 2.0)
        e = asym_edge(x, N, 2.0)
        assert abs(b.value - e.value) < 5.0 / math.sqrt(N)


def test_conjugation_symmetry_of_exact_basis(basis_T2):
    with raw_precision(basis_T2.precision_bits):
        for x in (0.2, 0.55, 0.9):
            plus = basis_T2.eval_on_arc_raw(21, x)
            minus = basis_T2.eval_on_arc_raw(21, -x)
            assert float(abs(minus - plus.conjugate())) < 1e-40


def test_magnitude_law_interior_vs_endpoint():
    basis = build_basis(2, 128)
    Ns = [16, 32, 64, 128]
    interior, endpoint = [], []
    for N in Ns:
        grid_int = np.linspace(-0.75, 0.75, 41)
        interior.append(max(abs(complex(basis.eval_on_arc_raw(N, float(x)))) for x in grid_int))
        grid_end = np.linspace(0.8, 1.0, 21)
        endpoint.append(max(abs(complex(basis.eval_on_arc_raw(N, float(x)))) for x in grid_end))
    fit = lambda v: float(  # noqa: E731
        np.linalg.lstsq(np.vstack([np.log(Ns), np.ones(4)]).T, np.log(v), rcond=None)[0][0]
    )
    assert abs(fit(interior) - 0.0) <= 0.15
    assert abs(fit(endpoint) - 0.5) <= 0.15


# -- conformal map -----------------------------------------------------------------


def test_tau_at_pi_and_alpha():
    a = math.pi / 2
    assert abs(arc_tau(math.pi, a) - math.pi / 2) < 1e-15
    assert arc_tau(a, a) == 0.0


def test_psi_modulus_one_on_arc():
    a = math.pi / 2
    z = cmath.exp(3j * math.pi / 4)
    psi = complex(conformal_psi(z, a, precision_bits=256).value)
    assert abs(abs(psi / cmath.exp(1j * 3 * math.pi / 8)) - 1.0) < 1e-12


def test_psi_equals_exp_minus_i_tau_on_arc():
    a = math.pi / 2
    for theta in (a + 0.1, math.pi / 2 + 0.9, math.pi, 2 * math.pi - a - 0.1):
        z = cmath.exp(1j * theta)
        psi = complex(conformal_psi(z, a, precision_bits=256).value)
        ratio = psi / cmath.exp(1j * theta / 2)
        assert abs(ratio - cmath.exp(-1j * arc_tau(theta, a))) < 1e-12


def test_psi_exterior_branch_grows():
    a = math.pi / 2
    for z in (3 + 0j, -4 + 0j, 0.5 + 3j):
        psi = complex(conformal_psi(z, a).value)
        assert abs(psi) > math.sqrt(abs(z))
