from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hodgecor import form_calculus as fc

ELL = fc.elliptic_torus(complex(0.3, 1.1))
SURF = fc.Torus((complex(0.5, 0.9), complex(-0.2, 1.3)))


def test_omega_m1_patterns():
    om = fc.expand_omega(1).patterns
    assert om == [(Fraction(-1, 2), ("id", "d")), (Fraction(1, 2), ("id", "db"))]
    xi = fc.expand_xi(1).patterns
    assert xi == [(-c, p) for c, p in om]


@pytest.mark.parametrize("m", range(0, 7))
def test_xi_eta_binomial_pattern(m):
    xi = fc.expand_xi(m)
    eta = fc.expand_eta(m)
    for k in range(m + 1):
        pat = ("id",) + ("d",) * k + ("db",) * (m - k)
        assert xi.coefficient(pat) == fc.binomial_pattern("xi", m, k)
    for k in range(-1, m + 1):
        pat = ("d",) * (k + 1) + ("db",) * (m - k)
        want = fc.binomial_pattern("eta", m, k) if k >= 0 else Fraction((-1) ** (m + 1), math.factorial(m + 1))
        assert eta.coefficient(pat) == want


def test_binomial_pattern_by_brute_force():
    # count raw d/db words with k d's directly
    for m in range(0, 7):
        for k in range(m + 1):
            raw = sum((-1) ** (m - k) for bits in range(1 << m) if bin(bits).count("1") == k)
            assert fc.binomial_pattern("xi", m, k) == Fraction(raw, math.factorial(m + 1))


@pytest.mark.parametrize("degs", [(0, 0, 0), (1, 0, 1), (1, 1, 0), (0, 1, 1, 0)])
def test_eta_slot_coefficients_are_unit(degs):
    m = len(degs) - 1
    terms = fc.expand_eta(m).slot_terms(degs)
    assert terms
    assert {abs(v) for v in terms.values()} == {1}


def test_sym_sign_on_transposition():
    assert fc.sym_sign((1, 0), (0, 0)) == -1
    assert fc.sym_sign((1, 0), (1, 0)) == 1
    assert fc.sym_sign((1, 0), (1, 1)) == 1


def test_mask_sign():
    assert fc.mask_sign(0b01, 0b10) == 1
    assert fc.mask_sign(0b10, 0b01) == -1
    assert fc.mask_sign(0b01, 0b01) == 0


def test_partial_matches_finite_difference():
    f = fc.FourierForm.mode(ELL, 0, (2, -1))
    x = (0.17, 0.41)
    h = 1e-6
    fd_s = (f.evaluate(0, (x[0] + h, x[1])) - f.evaluate(0, (x[0] - h, x[1]))) / (2 * h)
    fd_t = (f.evaluate(0, (x[0], x[1] + h)) - f.evaluate(0, (x[0], x[1] - h))) / (2 * h)
    df = f.d()
    # z = s + tau t, so dz = ds + tau dt and dzbar = ds + conj(tau) dt
    tau = ELL.taus[0]
    a, b = df.evaluate(0b01, x), df.evaluate(0b10, x)
    assert abs((a + b) - fd_s) < 1e-6 * max(1, abs(fd_s))
    assert abs((a * tau + b * np.conj(tau)) - fd_t) < 1e-6 * max(1, abs(fd_t))


def test_d_squared_and_dC():
    rng = np.random.default_rng(1)
    f = fc.FourierForm.random(SURF, 3, 1, rng)
    assert f.d().d().norm() < 1e-10 * f.norm()
    assert f.dC().dC().norm() < 1e-10 * f.norm()
    assert (f.partial().partialbar() + f.partialbar().partial()).norm() < 1e-10 * f.norm()


def test_volume_and_stokes():
    assert abs(fc.volume_form(SURF).integrate() - 1) < 1e-14
    rng = np.random.default_rng(2)
    g = fc.FourierForm.random(ELL, 4, 1, rng)
    assert abs(g.d().integrate()) < 1e-12
    with pytest.raises(fc.NotTopDegree):
        g.integrate()


def test_harmonic_pairing():
    e = fc.harmonic_generators(ELL)
    assert abs(e["e1"].wedge(e["e2"]).integrate() - 1) < 1e-14
    assert abs(fc.harmonic_form(ELL, "e1e2").integrate() - 1) < 1e-14


def test_band_cap_overflow():
    rng = np.random.default_rng(3)
    a = fc.FourierForm.random(ELL, 6, 0, rng, decay=0.0)
    a.cap = 8
    with pytest.raises(fc.BandwidthOverflow):
        a.wedge(a, tol=1e-12)


def _check_tuple(torus, band, degs, rng):
    m = len(degs) - 1
    fs = [fc.FourierForm.random(torus, band, d, rng) for d in degs]
    xi = fc.apply_termlist(fc.expand_xi(m), fs)
    eta = fc.apply_termlist(fc.expand_eta(m), fs)
    om = fc.apply_termlist(fc.expand_omega(m), fs)
    return (fc.relative_residual(xi.dC(), eta), fc.relative_residual(om, fc.omega_direct(fs)),
            fc.relative_residual(om.d(), fc.d_omega_rhs(fs)), eta.norm())


@pytest.mark.parametrize("degs", [(0, 0), (0,), (1,), (0, 0)])
def test_identities_elliptic_band8(degs):
    r1, r2, r3, nrm = _check_tuple(ELL, 8, degs, np.random.default_rng(len(degs)))
    assert nrm > 0
    assert max(r1, r2, r3) < 1e-10


@pytest.mark.parametrize("degs", [(0, 1), (1, 1), (0, 0, 1), (1, 0, 0)])
def test_identities_surface(degs):
    r1, r2, r3, nrm = _check_tuple(SURF, 2, degs, np.random.default_rng(7))
    assert nrm > 0
    assert max(r1, r2, r3) < 1e-10


@settings(max_examples=15)
@given(st.integers(0, 2 ** 31), st.integers(0, 1), st.integers(0, 1))
def test_dC_xi_equals_eta_property(seed, d0, d1):
    r1, _, r3, _ = _check_tuple(SURF, 1, (d0, d1), np.random.default_rng(seed))
    assert r1 < 1e-10 and r3 < 1e-10
