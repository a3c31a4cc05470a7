from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hodgecor import cyclic_words as cw
from hodgecor import free_lie as fl
from hodgecor import pd_algebra as pa
from hodgecor import scalars
from hodgecor.cyclic_words import Alphabet


def _alphabet(n_even: int, n_odd: int) -> Alphabet:
    letters = tuple(range(n_even + n_odd))
    return Alphabet(letters, tuple((i, 0 if i < n_even else 1) for i in letters), "homology")


@pytest.mark.parametrize("n_even,n_odd", [(2, 0), (0, 1), (1, 1), (0, 2), (2, 2)])
def test_lie_basis_matches_witt_formula(n_even, n_odd):
    al = _alphabet(n_even, n_odd)
    witt = fl.super_witt_dims(n_even, n_odd, 5)
    for L in range(1, 6):
        b = fl.lie_basis(al, L)
        assert len(b) == witt[L - 1]
        assert all(fl.is_lie(al, e) for e in b.elements)
        words = sorted({w for e in b.elements for w in e})
        idx = {w: i for i, w in enumerate(words)}
        rank = scalars.rank(scalars.dense_rows(b.elements, idx), len(words)) if words else 0
        assert rank == len(b)


def test_witt_frozen_values():
    # necklace counts: classical Witt numbers for 2 letters, super variants below
    assert fl.super_witt_dims(2, 0, 5) == [2, 1, 2, 3, 6]
    assert fl.super_witt_dims(0, 1, 5) == [1, 1, 0, 0, 0]
    assert fl.super_witt_dims(2, 2, 5) == [4, 8, 20, 64, 204]
    assert fl.super_witt_dims(0, 4, 5) == [4, 10, 20, 60, 204]


def test_lyndon_words():
    assert fl.lyndon_words([0, 1], 3) == [(0, 0, 1), (0, 1, 1)]
    assert fl.is_lyndon((0, 1)) and not fl.is_lyndon((1, 0))
    assert fl.standard_factorization((0, 0, 1)) == ((0,), (0, 1))


def test_dynkin_projector_on_brackets():
    al = _alphabet(1, 1)
    x = fl.left_normed(al, (0, 1, 1))
    # normalized Dynkin map fixes Lie elements of pure length
    assert fl.dynkin(al, x) == x
    assert fl.is_lie(al, x)
    assert not fl.is_lie(al, {(0, 1): Fraction(1)})


@pytest.fixture(scope="module")
def surface():
    A = pa.abelian_surface()
    return A, cw.homology_alphabet(A)


def _rand(al, rng, w=4):
    return cw.random_chain(al, rng, w, 3, min_len=2)


def test_antisymmetry(surface):
    A, al = surface
    rng = random.Random(1)
    for _ in range(30):
        F, G = _rand(al, rng), _rand(al, rng)
        s = (-1) ** (F.degree() * G.degree())
        assert (fl.bracket(A, F, G) + fl.bracket(A, G, F).scale(s)).is_zero()


def test_jacobi(surface):
    A, al = surface
    rng = random.Random(2)
    for _ in range(20):
        F, G, H = _rand(al, rng, 3), _rand(al, rng, 3), _rand(al, rng, 3)
        s = (-1) ** (F.degree() * G.degree())
        lhs = fl.bracket(A, F, fl.bracket(A, G, H))
        rhs = fl.bracket(A, fl.bracket(A, F, G), H) + fl.bracket(A, G, fl.bracket(A, F, H)).scale(s)
        assert (lhs - rhs).is_zero()


@pytest.mark.parametrize("name", ["ab-surface", "genus-2", "P2"])
def test_delta_delta_and_square(name):
    A = pa.get_model(name)
    al = cw.homology_alphabet(A)
    D = fl.canonical_delta(A, al)
    assert fl.bracket(A, D, D).is_zero()
    rng = random.Random(3)
    for _ in range(15):
        F = cw.random_chain(al, rng, 5, 3, min_len=2)
        assert fl.delta_op(A, fl.delta_op(A, F, D), D).is_zero()


def test_canonical_delta_surface_shape(surface):
    A, al = surface
    D = fl.canonical_delta(A, al)
    assert len(D.terms) == 12
    assert D.degree() == -1
    assert {len(w) for w in D.terms} == {3}


def test_theta_homomorphism(surface):
    A, al = surface
    rng = random.Random(4)
    for _ in range(20):
        F, G = _rand(al, rng), _rand(al, rng)
        T = fl.theta(A, fl.bracket(A, F, G))
        assert fl.commutator(fl.theta(A, F), fl.theta(A, G)) == fl.Derivation(al, T.images, T.degree)


@pytest.mark.parametrize("name", ["ab-surface", "genus-2", "P2"])
def test_theta_is_special(name):
    A = pa.get_model(name)
    al = cw.homology_alphabet(A)
    S = fl.special_element(A)
    assert fl.theta(A, fl.canonical_delta(A, al)).apply(S) == {}
    rng = random.Random(5)
    for _ in range(10):
        assert fl.theta(A, cw.random_chain(al, rng, 4, 2, min_len=2)).apply(S) == {}


def test_special_element_is_the_kernel(surface):
    # independent oracle: solve theta_F(x) = 0 for a quadratic x over random F
    A, al = surface
    red = A.reduced_indices()
    pairs = [(p, q) for p in red for q in red]
    rng = random.Random(2)
    Fs = [cw.random_chain(al, rng, 3, 2, min_len=2) for _ in range(30)]
    thetas = [fl.theta(A, F) for F in Fs]
    cols = []
    for pq in pairs:
        col = {}
        for i, D in enumerate(thetas):
            for w, c in D.apply({pq: Fraction(1)}).items():
                col[(i, w)] = c
        cols.append(col)
    keys = sorted({k for c in cols for k in c})
    idx = {k: i for i, k in enumerate(keys)}
    M = [[0] * len(cols) for _ in keys]
    for j, c in enumerate(cols):
        for k, v in c.items():
            M[idx[k]][j] = v
    ker = scalars.nullspace(M, len(cols))
    assert len(ker) == 1
    S = fl.special_element(A)
    v = ker[0]
    j0 = next(j for j, c in enumerate(v) if c)
    ratio = S[pairs[j0]] / v[j0]
    assert {pq: ratio * c for pq, c in zip(pairs, v) if c} == S


def test_theta_images_are_lie_on_clie(surface):
    A, al = surface
    for F in fl.clie_slice(A, al, 3, 0)[:5]:
        D = fl.theta(A, F)
        assert all(fl.is_lie(al, img) for img in D.images.values())


def test_iso_dimensions_frozen():
    reps = fl.iso_dimensions(pa.elliptic(), 5, "Htilde")
    assert [(r.slice_key, r.dim_clie, r.dim_der, r.theta_rank) for r in reps] == [
        ((2, 0, 2), 3, 3, 3), ((4, 0, 4), 1, 1, 1)]
    reps = fl.iso_dimensions(pa.genus_g(2), 4, "H")
    assert [(r.slice_key, r.dim_clie) for r in reps] == [((2, 0, 2), 10), ((3, 0, 3), 4), ((4, 0, 4), 20)]
    assert all(r.ok for r in reps)


def test_h0_delta_frozen():
    assert fl.h0_delta(pa.elliptic(), 4) == {
        2: {"dim": 3, "ker": 3, "im": 0, "h0": 3},
        3: {"dim": 0, "ker": 0, "im": 0, "h0": 0},
        4: {"dim": 1, "ker": 1, "im": 0, "h0": 1},
    }
    h = fl.h0_delta(pa.abelian_surface(), 3)
    assert h[2] == {"dim": 31, "ker": 15, "im": 0, "h0": 15}
    assert h[3] == {"dim": 108, "ker": 24, "im": 24, "h0": 0}


def test_exact_chain_vanishes_in_h0(surface):
    A, al = surface
    B = fl.clie_slice(A, al, 2, -1)[0]
    F = fl.delta_op(A, B)
    assert fl.delta_op(A, F).is_zero()


@given(st.integers(0, 10_000))
def test_bracket_bilinear(seed):
    A = pa.genus_g(2)
    al = cw.homology_alphabet(A)
    rng = random.Random(seed)
    F, G, H = (cw.random_chain(al, rng, 3, 2, min_len=2) for _ in range(3))
    assert fl.bracket(A, F + G.scale(2), H) == fl.bracket(A, F, H) + fl.bracket(A, G, H).scale(2)
