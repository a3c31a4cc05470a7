from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hodgecor import form_calculus as fc
from hodgecor import green_kernels as gk

HEX = complex(0.5, math.sqrt(3) / 2)
TALL = complex(0.1, 1.7)


def theta1(z, tau, terms=30):
    q = cmath.exp(1j * math.pi * tau)
    return 2 * sum((-1) ** n * q ** ((n + 0.5) ** 2) * cmath.sin((2 * n + 1) * math.pi * z) for n in range(terms))


def dedekind_eta(tau, terms=200):
    q = cmath.exp(2j * math.pi * tau)
    p = cmath.exp(2j * math.pi * tau / 24)
    for n in range(1, terms):
        p *= 1 - q ** n
    return p


def theta_green(u, tau):
    # mean-zero Green function from the Jacobi theta function
    z = u[0] + tau * u[1]
    return math.log(abs(theta1(z, tau) / dedekind_eta(tau)) ** 2) - 2 * math.pi * z.imag ** 2 / tau.imag


@pytest.mark.parametrize("tau", [HEX, TALL])
@pytest.mark.parametrize("u", [(0.5, 0.0), (0.31, 0.17), (0.1, 0.8), (0.5, 0.5)])
def test_g_matches_theta_oracle(tau, u):
    T = fc.elliptic_torus(tau)
    assert abs(gk.g_value(T, u).value - theta_green(u, tau)) < 1e-12


@pytest.mark.parametrize("tau", [HEX, TALL])
def test_log_singularity_constant(tau):
    T = fc.elliptic_torus(tau)
    r = 1e-5
    u = np.array([0.6 * r, 0.3 * r])
    z = u[0] + tau * u[1]
    lim = math.log(abs(2 * math.pi * dedekind_eta(tau) ** 2) ** 2)
    assert abs(gk.g_value(T, u).value - math.log(abs(z) ** 2) - lim) < 1e-6


def test_ewald_split_independent_of_s0():
    T = fc.elliptic_torus(HEX)
    vals = [gk.g_value(T, (0.2, 0.7), s0=s).value for s in (0.5, 1.0, 2.0)]
    assert max(abs(v - vals[0]) for v in vals) < 1e-13


def test_slow_spectral_sum_approaches():
    T = fc.elliptic_torus(HEX)
    ref = gk.g_value(T, (0.5, 0.0)).value
    errs = [abs(gk.g_slow(T, (0.5, 0.0), B) - ref) for B in (50, 200)]
    assert errs[1] < errs[0] < 2e-2


@pytest.mark.parametrize("tau", [HEX, TALL])
def test_derivatives_match_finite_differences(tau):
    T = fc.elliptic_torus(tau)
    u = np.array([0.31, 0.17])
    h = 1e-5
    dz = gk.g_value(T, u, "dz1").value
    dzb = gk.g_value(T, u, "dzb1").value
    fd_s = (gk.g_value(T, u + [h, 0]).value - gk.g_value(T, u - [h, 0]).value) / (2 * h)
    fd_t = (gk.g_value(T, u + [0, h]).value - gk.g_value(T, u - [0, h]).value) / (2 * h)
    assert abs(fd_s - (dz + dzb)) < 1e-7
    assert abs(fd_t - (tau * dz + np.conj(tau) * dzb)) < 1e-7


@pytest.mark.parametrize("tau", [HEX, TALL])
@pytest.mark.parametrize("mu", ["volume", "delta"])
def test_weak_residual_band4(tau, mu):
    P = gk.build_propagator(fc.elliptic_torus(tau), mu, point=(0.1, 0.2), truncation=64)
    r = gk.weak_residual(P, 4)
    assert r.num_tests > 0
    assert r.max_abs < 1e-8


def test_surface_weak_residual():
    S = fc.Torus((HEX, complex(0.2, 1.2)))
    r = gk.weak_residual(gk.build_propagator(S, truncation=8), 4)
    assert r.max_abs < 1e-8


def test_coefficients_symmetric_and_mean_zero():
    for T in (fc.elliptic_torus(TALL), fc.Torus((HEX, complex(0.2, 1.2)))):
        P = gk.build_propagator(T, truncation=6)
        flipped = P.coeffs[tuple(slice(None, None, -1) for _ in range(T.real_dim))]
        assert np.max(np.abs(P.coeffs - flipped)) < 1e-15
        assert gk.harmonic_orthogonality(P) == 0.0


@settings(max_examples=20)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_green_symmetric_in_arguments(a, b, c, d):
    P = gk.build_propagator(fc.elliptic_torus(HEX), "delta", point=(0.1, 0.2), truncation=4)
    x, y = (a, b), (c, d)
    if np.allclose(gk._wrap(np.subtract(x, y)), 0, atol=1e-3):
        return
    assert abs(gk.eval_green(P, x, y).value - gk.eval_green(P, y, x).value) < 1e-12


def test_on_diagonal_and_dimension_errors():
    P = gk.build_propagator(fc.elliptic_torus(HEX), truncation=4)
    with pytest.raises(gk.OnDiagonal):
        gk.eval_green(P, (0.3, 0.3), (1.3, 0.3))
    with pytest.raises(gk.UnsupportedDimension):
        gk.build_propagator(fc.Torus((HEX, HEX, HEX)), truncation=2)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("deriv", ["id", "dz1"])
def test_batch_agrees_with_pointwise(n, deriv):
    T = fc.Torus((HEX, complex(0.3, 1.1))[:n])
    U = np.random.default_rng(n).random((15, 2 * n))
    ref = np.array([gk.g_value(T, u, deriv).value for u in U])
    # the batched tails are cut per term at 1e-9, so the surface sum drifts a little more
    assert np.max(np.abs(gk.g_batch(T, U, deriv) - ref)) < (1e-9 if n == 1 else 1e-6)
