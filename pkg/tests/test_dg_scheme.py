from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from hodgecor import dg_scheme as dg
from hodgecor.cyclic_words import CyclicChain, homology_alphabet
from hodgecor.form_calculus import FourierForm, Torus, elliptic_torus, harmonic_form
from hodgecor.free_lie import canonical_delta, clie_slice, commutator as dcomm, delta_op, theta
from hodgecor.pd_algebra import abelian_surface, elliptic, genus_g

SL2 = dg.sl2()
MAT2 = dg.mat_n(2)


@pytest.mark.parametrize("g", [SL2, MAT2, dg.abelian_lie(3)])
def test_quadratic_lie_algebras(g):
    assert g.jacobi_defect() == 0
    assert g.invariance_defect() == 0
    assert g.is_nondegenerate()


CASES = [(elliptic(), SL2, False), (genus_g(2), MAT2, False), (abelian_surface(), SL2, True),
         (abelian_surface(), SL2, False)]


@pytest.mark.parametrize("A,g,red", CASES, ids=lambda x: getattr(x, "name", str(x)))
def test_chern_simons_field_squares_to_zero(A, g, red):
    Q = dg.chern_simons_field(g, A, red)
    assert Q.comps
    assert dg.square(Q).is_zero()
    assert all(dg.symplectic_checks(A, g, red).values())


@pytest.mark.parametrize("A,g,red", CASES, ids=lambda x: getattr(x, "name", str(x)))
def test_chern_simons_field_is_hamiltonian(A, g, red):
    Q = dg.chern_simons_field(g, A, red)
    H = dg.cs_hamiltonian_field(A, g, red)
    assert (H - Q).is_zero()
    assert not (H + Q).is_zero()


def test_transport_of_canonical_derivation():
    A = abelian_surface()
    Q = dg.chern_simons_field(SL2, A, True)
    V = dg.transport_derivation(A, SL2, theta(A, canonical_delta(A)))
    assert (V + Q).is_zero()
    assert (V - dg.field_of_chain(A, SL2, canonical_delta(A))).is_zero()


@pytest.mark.parametrize("A,g", [(elliptic(), SL2), (abelian_surface(), SL2), (genus_g(2), MAT2)],
                         ids=["elliptic", "ab-surface", "genus-2"])
@pytest.mark.parametrize("length", [3, 4])
def test_theta_transport_matches_hamiltonian_field(A, g, length):
    ah = homology_alphabet(A)
    S = clie_slice(A, ah, length, -(2 * A.n - 2))
    rng = random.Random(length)
    F = CyclicChain(ah, {}, True)
    for c in S[:6]:
        F = F + c.scale(Fraction(rng.randint(-3, 3)))
    assert (dg.field_of_chain(A, g, F) - dg.theta_transport(A, g, F)).is_zero()


@pytest.mark.parametrize("d", [-1, 0])
def test_transport_is_a_lie_map(d):
    A = abelian_surface()
    ah = homology_alphabet(A)
    rng = random.Random(3)
    F = CyclicChain(ah, {}, True)
    for c in rng.sample(clie_slice(A, ah, 3, d), 3):
        F = F + c
    D1, D2 = theta(A, canonical_delta(A)), theta(A, F)
    lhs = dg.commutator(dg.transport_derivation(A, SL2, D1), dg.transport_derivation(A, SL2, D2))
    assert (lhs - dg.transport_derivation(A, SL2, dcomm(D1, D2))).is_zero()
    assert theta(A, delta_op(A, F)) == dcomm(D1, D2)


def test_synthetic_closed_chain_deforms():
    A = abelian_surface()
    F = dg.synthetic_closed_chain(A)
    assert {len(w) for w in F.terms} == {3, 4}
    assert delta_op(A, F).is_zero()
    Q = dg.chern_simons_field(SL2, A, True)
    V = dg.hodge_field(F, SL2, A)
    assert V.comps
    assert dg.commutator(Q, V).is_zero()
    assert dg.deformation_square(Q, V).is_zero()


def test_non_closed_chain_does_not_deform():
    A = abelian_surface()
    ah = homology_alphabet(A)
    G = CyclicChain(ah, {}, True)
    for c in clie_slice(A, ah, 3, 0)[:3]:
        G = G + c
    assert not delta_op(A, G).is_zero()
    Q = dg.chern_simons_field(SL2, A, True)
    assert not dg.deformation_square(Q, dg.hodge_field(G, SL2, A)).is_zero()


def test_hodge_field_reports_missing_entries():
    from hodgecor.correlator_engine import CorrelatorTable, surface_config
    A = abelian_surface()
    with pytest.raises(dg.MissingEntries):
        dg.hodge_field(CorrelatorTable(A.name, surface_config(), {}), SL2, A, poly_degree=3)


def test_chevalley_abelian_is_free():
    L = dg.abelian_dg([0, 0, 1])
    rep = dg.chevalley_cohomology(L, True, 3)
    sym = dg.symmetric_power_dims([0, 0, 1], 3)
    assert sym == {0: 1, 1: 3, 2: 4, 3: 4}
    assert sum(rep.dims.values()) == L.dim * sum(v for k, v in sym.items() if k > 0)


def test_chevalley_invariant_under_contractible_extension():
    L = dg.abelian_dg([0, 0, 1])
    a = dg.chevalley_cohomology(L, True, 3).dims
    b = dg.chevalley_cohomology(dg.contractible_extension(L, 0), True, 3).dims

    def by_degree(d):
        out = {}
        for (deg, _), v in d.items():
            out[deg] = out.get(deg, 0) + v
        return {k: v for k, v in out.items() if v}

    assert by_degree(a) == by_degree(b) == {0: 6, 1: 15, 2: 10, 3: 2}


def test_chevalley_free_lie_low_degree():
    rep = dg.chevalley_cohomology(dg.free_lie_dg(2, 3), True, 3)
    assert rep.nonzero()[(1, 0)] == 4
    assert rep.nonzero()[(2, -2)] == 3


def _action_fixture(T, band, hlabels, rng, g):
    phi = [sum((FourierForm.random(T, band, d, rng) for d in (0, 2)), FourierForm.zero(T, band))
           for _ in range(g.dim)]
    alpha = [harmonic_form(T, hlabels[0]).scale(0.3 * (i + 1)) + harmonic_form(T, hlabels[1]).scale(0.2)
             for i in range(g.dim)]
    return phi, alpha, [p.dC() for p in phi]


@pytest.mark.parametrize("T,band,labels", [(elliptic_torus(), 4, ("e1", "e2")),
                                           (Torus((complex(0.5, 3 ** 0.5 / 2),) * 2), 2, ("e1", "e2e3e4"))],
                         ids=["curve", "surface"])
def test_action_functional_gauge_invariance(T, band, labels):
    rng = np.random.default_rng(1)
    phi, alpha, psi0 = _action_fixture(T, band, labels, rng, SL2)
    S = dg.action_functional(psi0, alpha, phi, SL2)
    shift = [FourierForm.random(T, band, 1, rng).dC() for _ in range(SL2.dim)]
    S2 = dg.action_functional(psi0, alpha, [p + e for p, e in zip(phi, shift)], SL2)
    assert abs(S) > 1
    assert abs(S - S2) < 1e-9 * abs(S)


def test_action_functional_rejects_bad_splitting():
    T = elliptic_torus()
    rng = np.random.default_rng(1)
    phi, alpha, psi0 = _action_fixture(T, 3, ("e1", "e2"), rng, SL2)
    with pytest.raises(dg.SplittingViolation):
        dg.action_functional(psi0, alpha, [p + FourierForm.random(T, 2, 0, rng) for p in phi], SL2)


def test_abelian_action_matches_grid_quadrature():
    # for abelian g the action is 1/2 int phi d psi; compare with a pointwise product on a grid
    T = elliptic_torus(complex(0.2, 1.1))
    g = dg.abelian_lie(2)
    rng = np.random.default_rng(4)
    phi = [FourierForm.random(T, 3, 0, rng) for _ in range(2)]
    alpha = [harmonic_form(T, "e1").scale(0.5), harmonic_form(T, "e2")]
    psi0 = [p.dC() for p in phi]
    S = dg.action_functional(psi0, alpha, phi, g)
    N = 16
    grid = [(s / N, t / N) for s in range(N) for t in range(N)]
    total = 0j
    for p0, a, ph in zip(psi0, alpha, phi):
        dpsi = (p0 + a).d()
        total += np.mean([ph.evaluate(0, x) * dpsi.evaluate(0b11, x) for x in grid])
    assert abs(S - 0.5 * total * T.top_integral()) < 1e-10 * max(1.0, abs(S))
