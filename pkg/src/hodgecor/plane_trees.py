"""Plane trivalent trees with cyclically ordered legs and orientation-torsor signs.

Legs 0..m sit clockwise on the boundary circle.  A tree is built as a planted
binary tree hanging from leg 0; at every internal vertex the incident edges are
listed (parent, left, right), which is the clockwise order.

Edges are stored internal-first (in depth-first order) and then external by leg
index.  The canonical clockwise generator of the orientation torsor is the
wedge of edges in the order of a depth-first walk from leg 0 going clockwise;
``orientation_sign`` records the sign of the stored order against it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple, Union

End = Tuple[str, int]  # ("v", vertex) or ("L", leg)


class TooFewLegs(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: int
    ends: Tuple[End, End]

    @property
    def internal(self) -> bool:
        return self.ends[0][0] == "v" and self.ends[1][0] == "v"


@dataclass(frozen=True)
class PlaneTree:
    num_legs: int
    vertices: Tuple[Tuple[int, int, int], ...]
    edges: Tuple[Edge, ...]
    orientation_sign: int
    shape: tuple = ()

    @property
    def m(self) -> int:
        return self.num_legs - 1

    @property
    def internal_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.internal]

    @property
    def external_edges(self) -> List[Edge]:
        return [e for e in self.edges if not e.internal]

    def leg_edge(self, j: int) -> Edge:
        return self.edges[len(self.internal_edges) + j]

    def leg_vertex(self, j: int) -> int:
        e = self.leg_edge(j)
        return next(x[1] for x in e.ends if x[0] == "v")

    def internal_pairs(self) -> List[Tuple[int, int]]:
        return [(e.ends[0][1], e.ends[1][1]) for e in self.internal_edges]

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "edges": [[e.id, [list(x) for x in e.ends]] for e in self.edges],
            "sign": self.orientation_sign,
        }

    @staticmethod
    def from_json(num_legs: int, data: dict) -> "PlaneTree":
        edges = tuple(Edge(i, (tuple(a), tuple(b))) for i, (a, b) in ((e[0], e[1]) for e in data["edges"]))
        return PlaneTree(num_legs, tuple(tuple(v) for v in data["vertices"]), edges, int(data["sign"]))


Shape = Union[int, tuple]


@lru_cache(maxsize=None)
def _shapes(lo: int, hi: int) -> Tuple[Shape, ...]:
    """Planted binary trees with leaves lo..hi in order."""
    if lo == hi:
        return (lo,)
    out = []
    for mid in range(lo, hi):
        for left in _shapes(lo, mid):
            for right in _shapes(mid + 1, hi):
                out.append((left, right))
    return tuple(out)


def permutation_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _build(num_legs: int, shape: Shape) -> PlaneTree:
    vertices: List[List[int]] = []
    dfs: List[tuple] = []  # edge descriptors in depth-first clockwise order
    ends: Dict[tuple, Tuple[End, End]] = {}

    def walk(node: Shape, parent_key: tuple) -> None:
        # parent_key already pushed; node hangs below it
        if isinstance(node, int):
            return
        v = len(vertices)
        vertices.append([None, None, None])
        # fix the parent edge end
        a, _ = ends[parent_key]
        ends[parent_key] = (a, ("v", v))
        vertices[v][0] = parent_key
        for slot, child in ((1, node[0]), (2, node[1])):
            key = ("leg", child) if isinstance(child, int) else ("int", len(dfs))
            dfs.append(key)
            ends[key] = (("v", v), ("L", child) if isinstance(child, int) else None)
            vertices[v][slot] = key
            walk(child, key)

    root_key = ("leg", 0)
    dfs.append(root_key)
    ends[root_key] = (("L", 0), None)
    walk(shape, root_key)

    internal = [k for k in dfs if k[0] == "int"]
    external = sorted((k for k in dfs if k[0] == "leg"), key=lambda k: k[1])
    stored = internal + external
    new_id = {k: i for i, k in enumerate(stored)}
    # position in dfs of each stored edge: sign of stored order vs canonical
    pos = {k: i for i, k in enumerate(dfs)}
    sign = permutation_sign([pos[k] for k in stored])
    edges = []
    for k in stored:
        a, b = ends[k]
        if k[0] == "leg":
            va = a if a[0] == "v" else b
            edges.append(Edge(new_id[k], (va, ("L", k[1]))))
        else:
            edges.append(Edge(new_id[k], (a, b)))
    verts = tuple(tuple(new_id[k] for k in v) for v in vertices)
    return PlaneTree(num_legs, verts, tuple(edges), sign, shape)


def enumerate_trees(num_legs: int) -> List[PlaneTree]:
    """All plane trivalent trees with ``num_legs`` cyclically ordered legs, once each."""
    if num_legs < 3:
        raise TooFewLegs(f"need at least 3 legs, got {num_legs}")
    return [_build(num_legs, s) for s in _shapes(1, num_legs - 1)]


def orientation_sign(T: PlaneTree, edge_order: Sequence[int]) -> int:
    """Sign of E_{order[0]} ^ ... against the clockwise generator."""
    if sorted(edge_order) != list(range(len(T.edges))):
        raise ValueError("edge_order must be a permutation of the edges")
    return T.orientation_sign * permutation_sign(edge_order)


def dual_triangulation(T: PlaneTree) -> frozenset:
    """Diagonals of the dual triangulation of the (num_legs)-gon.

    Leg j is the polygon side between corners j and j+1; an internal edge whose
    far side carries legs lo..hi is dual to the diagonal (lo, hi+1).
    """
    out = set()

    def leaves(node):
        return (node, node) if isinstance(node, int) else (leaves(node[0])[0], leaves(node[1])[1])

    def walk(node):
        if isinstance(node, int):
            return
        for child in node:
            if not isinstance(child, int):
                lo, hi = leaves(child)
                out.add((lo, hi + 1))
            walk(child)

    walk(T.shape)
    return frozenset(out)


def rotate_tree(T: PlaneTree, r: int) -> frozenset:
    """Dual diagonals after relabelling legs j -> j + r (mod num_legs)."""
    k = T.num_legs
    return frozenset(tuple(sorted(((a + r) % k, (b + r) % k))) for a, b in dual_triangulation(T))


def trees_json(num_legs: int) -> dict:
    return {"legs": num_legs, "trees": [T.to_json() for T in enumerate_trees(num_legs)]}


def dumps(num_legs: int) -> str:
    return json.dumps(trees_json(num_legs))
