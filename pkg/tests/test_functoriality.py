from __future__ import annotations

from fractions import Fraction

import pytest

from hodgecor import functoriality as fn
from hodgecor.free_lie import canonical_delta, theta
from hodgecor.pd_algebra import abelian_surface, elliptic, genus_g, shipped_morphisms

MORPHISMS = {f.name: f for f in shipped_morphisms()}


@pytest.mark.parametrize("A", [elliptic(), abelian_surface(), genus_g(2)], ids=lambda A: A.name)
def test_generator_formula_matches_theta_of_delta(A):
    D = theta(A, canonical_delta(A))
    for h in A.reduced_indices():
        direct = fn.delta_generator(A, {h: Fraction(1)})
        via_theta = {w: c for w, c in D.image(h).items() if c}
        assert direct == via_theta


def test_shipped_morphism_names():
    assert set(MORPHISMS) == {"id_elliptic", "id_ab-surface", "diagonal", "projection"}


@pytest.mark.parametrize("name", sorted(MORPHISMS))
def test_projection_formula_and_adjunction_exact(name):
    f = MORPHISMS[name]
    assert fn.projection_formula_failures(f) == []
    assert fn.adjunction_failures(f) == []


@pytest.mark.parametrize("name", sorted(MORPHISMS))
def test_chain_map_on_all_classes(name):
    assert fn.chain_map_failures(MORPHISMS[name], reduced=False) == []


@pytest.mark.parametrize("name", ["id_elliptic", "id_ab-surface", "diagonal"])
def test_chain_map_on_reduced_generators(name):
    assert fn.chain_map_failures(MORPHISMS[name], reduced=True) == []


def test_reduced_projection_loses_fundamental_class_term():
    # e1e2|1 pushes to the fundamental class of the target, which the reduced basis excludes
    bad = fn.chain_map_failures(MORPHISMS["projection"], reduced=True)
    assert [b["generator"] for b in bad] == ["e1e2|1"]
    assert bad[0]["rhs"] == {}
    assert bad[0]["lhs"]
