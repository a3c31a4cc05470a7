from __future__ import annotations

import dataclasses
import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from hodgecor import correlator_engine as ce
from hodgecor import cyclic_words as cw
from hodgecor import free_lie as fl
from hodgecor.form_calculus import FourierForm, harmonic_form
from hodgecor.pd_algebra import abelian_surface, elliptic

E = elliptic()
AB = abelian_surface()


@pytest.fixture(scope="module")
def eng64():
    return ce.CorrelatorEngine(E, ce.elliptic_config(mu="delta", point=(0.1, 0.2), grid=64))


def _hcc_reference(A, w):
    v = A.mul(A.mul({w[0]: Fraction(1)}, {w[1]: Fraction(1)}), {w[2]: Fraction(1)})
    return (-1) ** A.deg(w[1]) * A.trace(v)


def test_filter_examples():
    assert ce.may_contribute((1, 2, 1, 2), E)
    assert not ce.may_contribute((1, 1, 1, 2), E)
    assert not ce.may_contribute((0, 1, 2), E)
    assert ce.may_contribute((1, 2, 3), E) is False or E.deg(3) < 2
    assert ce.dimension_count(E, (1, 2, 1, 2, 1, 2)) == (8, 8)


def test_word_too_short(eng64):
    with pytest.raises(ce.WordTooShort):
        eng64.correlator((1, 2))


def test_degree_filter_reason(eng64):
    assert eng64.correlator((1, 1, 1, 2)).reason == "degree-filter"


@pytest.mark.parametrize("A,cfg", [(E, ce.elliptic_config()), (AB, ce.surface_config(mc_samples=2000))])
def test_three_point_is_trace(A, cfg):
    eng = ce.CorrelatorEngine(A, cfg)
    # on the curve every three-letter trace vanishes, so force the integrals through
    for w in ce.cohomology_words(A, 3):
        assert abs(eng.correlator(w, force=True).value - complex(_hcc_reference(A, w))) < 1e-10
    assert any(_hcc_reference(AB, w) != 0 for w in ce.cohomology_words(AB, 3))


FROZEN = {
    (1, 2, 1, 2, 1, 2): (-22.080633, 0.029262),
    (1, 1, 1, 2, 2, 2): (-3.680105, 0.004877),
    (1, 1, 1, 1, 2, 2): (-0.00041, 0.00136),
}


@pytest.mark.parametrize("w", sorted(FROZEN))
def test_frozen_six_point_values(eng64, w):
    val, err = FROZEN[w]
    est = eng64.correlator(w)
    assert abs(est.value.imag - val) < 1e-5
    if abs(val) > 1:
        assert abs(est.value.real) < 1e-9
    assert abs(est.error - err) < 1e-5


def test_grid_refinement_within_error(eng64):
    fine = ce.CorrelatorEngine(E, ce.elliptic_config(mu="delta", point=(0.1, 0.2), grid=128))
    for w in [(1, 2, 1, 2, 1, 2), (1, 1, 1, 2, 2, 2)]:
        a, b = eng64.correlator(w), fine.correlator(w)
        assert abs(a.value - b.value) <= a.error
        assert b.error < a.error


@pytest.mark.parametrize("w", [(1, 2, 1, 2, 1, 2), (1, 1, 2, 1, 2, 2)])
def test_cyclic_and_reflection_invariance(eng64, w):
    base = eng64.tree_sum(ce.harmonic_legs(eng64.torus, E, w), [1] * 6).value
    for r in range(1, 6):
        rw = w[r:] + w[:r]
        assert abs(eng64.tree_sum(ce.harmonic_legs(eng64.torus, E, rw), [1] * 6).value - base) < 1e-10
    rev = tuple(reversed(w))
    assert abs(eng64.tree_sum(ce.harmonic_legs(eng64.torus, E, rev), [1] * 6).value - base) < 1e-10


def shuffle_families(p_plus_q):
    out = []
    for v0 in (1, 2):
        for p in range(1, p_plus_q):
            for left in itertools.product((1, 2), repeat=p):
                for right in itertools.product((1, 2), repeat=p_plus_q - p):
                    out.append((v0, left, right))
    return out


@pytest.mark.parametrize("fam", shuffle_families(2) + shuffle_families(3)[::3][:10])
def test_shuffle_relations(eng64, fam):
    assert abs(ce.shuffle_residual(eng64, *fam).value) < 1e-6


def test_shuffle_relation_at_six_points(eng64):
    assert abs(ce.shuffle_residual(eng64, 1, (1, 2), (2, 1, 2)).value) < 1e-6


def test_forced_filtered_words_vanish(eng64):
    words = [w for L in (4, 5, 6) for w in ce.cohomology_words(E, L) if not ce.may_contribute(w, E)]
    assert len(words) >= 5
    for w in words[:6]:
        assert abs(eng64.correlator(w, force=True).value) < 1e-6


KAPPA = complex(-0.38207086017725556, -3.5221383261549533)


@pytest.mark.parametrize("mu", ["volume", "delta"])
def test_exact_leg_collapse(mu):
    cfg = ce.elliptic_config(mu=mu, point=(0.1, 0.2), grid=64)
    omega = ce.CorrelatorEngine(E, cfg)
    eta = ce.CorrelatorEngine(E, dataclasses.replace(cfg, flavor="eta"))
    T = omega.torus
    rng = np.random.default_rng(5)
    beta, gam = FourierForm.random(T, 3, 0, rng), FourierForm.random(T, 3, 0, rng)
    a2 = harmonic_form(T, "e2")
    for i, tree in enumerate(omega.trees(4)):
        k = omega.kappa_integral(i, tree, [beta.dC(), a2, gam.dC(), a2]).value
        h = eta.kappa_integral(i, tree, [beta, a2, gam.dC(), a2]).value
        z = eta.kappa_integral(i, tree, [beta.dC(), a2, gam.dC(), harmonic_form(T, "1")]).value
        assert abs(k - h) < 1e-12
        assert abs(k - KAPPA) < 1e-12
        assert abs(z) < 1e-12


def test_surface_backend_rejects_delta():
    with pytest.raises(ce.UnsupportedBackend):
        ce.CorrelatorEngine(AB, ce.surface_config(mu="delta"))
    with pytest.raises(ce.UnsupportedBackend):
        ce.CorrelatorEngine(E, ce.surface_config())


def test_small_class_is_closed_and_roundtrips():
    cls = ce.correlator_class(AB, ce.surface_config(mc_samples=4000), 4)
    rep = ce.delta_residual(AB, cls)
    assert rep.passes(3.0, 5e-2)
    data = cls.table.to_json(AB)
    assert data["config_hash"] == cls.table.config.digest()
    back = ce.CorrelatorTable.from_json(AB, data)
    assert back.config == cls.table.config
    assert set(back.entries) == set(cls.table.entries)
    for w, e in cls.table.entries.items():
        assert abs(back.entries[w].value - e.value) < 1e-12


def test_fit_coboundary_recovers_exact_difference():
    alpha = cw.homology_alphabet(AB)
    rng = random.Random(4)
    B = cw.random_chain(alpha, rng, 3, 4, min_len=3)
    diff = fl.delta_op(AB, B)
    fitted, rep = ce.fit_coboundary(AB, diff, 3)
    assert rep.worst() < 1e-10
    back = fl.delta_op(AB, fitted) - diff
    assert max((abs(complex(c)) for c in back.terms.values()), default=0.0) < 1e-10
