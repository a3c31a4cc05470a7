from __future__ import annotations

import json
from functools import lru_cache
from math import comb

import pytest
from hypothesis import given, strategies as st

from hodgecor import plane_trees as pt


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _triangulations(poly: tuple) -> frozenset:
    """All triangulations of a convex polygon, as frozensets of diagonals."""
    if len(poly) < 3:
        return frozenset({frozenset()})
    a, b = poly[0], poly[-1]
    out = set()
    for m in range(1, len(poly) - 1):
        c = poly[m]
        extra = set()
        if m > 1:
            extra.add(tuple(sorted((a, c))))
        if m < len(poly) - 2:
            extra.add(tuple(sorted((c, b))))
        for left in _triangulations(poly[: m + 1]):
            for right in _triangulations(poly[m:]):
                out.add(frozenset(extra | left | right))
    return frozenset(out)


def triangulations(k: int) -> frozenset:
    # corners 1..k; leg j is the side (j, j+1) and leg 0 the side (k, 1)
    return _triangulations(tuple(range(1, k + 1)))


@pytest.mark.parametrize("k", range(3, 13))
def test_catalan_counts(k):
    assert len(pt.enumerate_trees(k)) == catalan(k - 2)


@pytest.mark.parametrize("k", range(3, 10))
def test_trees_biject_to_triangulations(k):
    trees = pt.enumerate_trees(k)
    duals = [pt.dual_triangulation(T) for T in trees]
    assert len(set(duals)) == len(trees)
    assert set(duals) == set(triangulations(k))


def test_small_cases():
    assert len(pt.enumerate_trees(3)) == 1
    assert len(pt.enumerate_trees(4)) == 2
    with pytest.raises(pt.TooFewLegs):
        pt.enumerate_trees(2)


@pytest.mark.parametrize("k", [3, 5, 7])
def test_structure(k):
    for T in pt.enumerate_trees(k):
        assert len(T.internal_edges) == k - 3
        assert len(T.external_edges) == k
        assert len(T.vertices) == k - 2
        # each edge end appears in exactly the vertex triples it touches
        incid = {}
        for v, triple in enumerate(T.vertices):
            for e in triple:
                incid.setdefault(e, []).append(v)
        for e in T.edges:
            vs = sorted(x[1] for x in e.ends if x[0] == "v")
            assert sorted(incid[e.id]) == vs
        assert [T.leg_edge(j).ends[1] for j in range(k)] == [("L", j) for j in range(k)]


def test_deterministic_order():
    a = [T.to_json() for T in pt.enumerate_trees(6)]
    b = [T.to_json() for T in pt.enumerate_trees(6)]
    assert a == b


@given(st.integers(3, 8), st.data())
def test_orientation_torsor(k, data):
    trees = pt.enumerate_trees(k)
    T = trees[data.draw(st.integers(0, len(trees) - 1))]
    E = len(T.edges)
    ident = list(range(E))
    assert pt.orientation_sign(T, ident) == T.orientation_sign
    i, j = data.draw(st.integers(0, E - 1)), data.draw(st.integers(0, E - 1))
    if i != j:
        sw = ident[:]
        sw[i], sw[j] = sw[j], sw[i]
        assert pt.orientation_sign(T, sw) == -T.orientation_sign
    m = k - 1
    rev = pt.orientation_sign(T, ident[::-1]) * T.orientation_sign
    assert E == 2 * m - 1
    assert rev == (-1) ** ((2 * m - 1) * (2 * m - 2) // 2)


def test_orientation_rejects_non_permutation():
    T = pt.enumerate_trees(4)[0]
    with pytest.raises(ValueError):
        pt.orientation_sign(T, [0, 0, 1, 2, 3])


def test_json_roundtrip():
    data = json.loads(pt.dumps(5))
    assert data["legs"] == 5 and len(data["trees"]) == 5
    for T, d in zip(pt.enumerate_trees(5), data["trees"]):
        U = pt.PlaneTree.from_json(5, d)
        assert U.vertices == T.vertices and U.edges == T.edges and U.orientation_sign == T.orientation_sign


def test_rotation_permutes_trees():
    k = 6
    duals = {pt.dual_triangulation(T) for T in pt.enumerate_trees(k)}
    for T in pt.enumerate_trees(k):
        rot = pt.rotate_tree(T, 1)
        # relabelled corners (mod k, with 0 standing for k) give another tree of the list
        fixed = frozenset(tuple(sorted((a or k, b or k))) for a, b in rot)
        assert fixed in duals
