"""Functoriality checks for maps f: X -> Y given by pullbacks on cohomology models.

The differential on generators is written directly from the product,

    delta(h) = sum_{a0, a1, k} c(a0, a1, k) <alpha_k cap H cap h> a0 (x) a1,

with c the cubic coefficients; ``reduced=True`` sums over 0 < deg < 2n only
(the generators of the free Lie algebra), ``reduced=False`` over all classes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from .free_lie import cubic_coefficient
from .pd_algebra import AlgebraMorphism, PDAlgebra, hom_pairing

Tensor = Dict[Tuple[int, ...], Fraction]


def _classes(A: PDAlgebra, reduced: bool) -> List[int]:
    return A.reduced_indices() if reduced else list(range(A.dim))


def delta_generator(A: PDAlgebra, h: Dict[int, Fraction], reduced: bool = True) -> Tensor:
    cls = _classes(A, reduced)
    weights = {k: hom_pairing(A, {k: Fraction(1)}, h) for k in cls}
    out: Tensor = {}
    for a0 in cls:
        for a1 in cls:
            c = sum((cubic_coefficient(A, a0, a1, k) * wk for k, wk in weights.items() if wk), Fraction(0))
            if c:
                out[(a0, a1)] = c
    return out


def push_tensor(f: AlgebraMorphism, t: Tensor, reduced: bool = True) -> Tensor:
    keep = set(_classes(f.target, reduced))
    out: Tensor = {}
    for w, c in t.items():
        partial = {(): c}
        for a in w:
            nxt: Tensor = {}
            img = f.push_hom({a: Fraction(1)})
            for u, x in partial.items():
                for b, d in img.items():
                    if b in keep:
                        nxt[u + (b,)] = nxt.get(u + (b,), 0) + x * d
            partial = nxt
        for u, x in partial.items():
            out[u] = out.get(u, 0) + x
    return {k: v for k, v in out.items() if v}


@dataclass
class FunctorialityReport:
    name: str
    chain_map_failures: List[dict] = field(default_factory=list)
    projection_failures: List[dict] = field(default_factory=list)
    adjunction_failures: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.chain_map_failures or self.projection_failures or self.adjunction_failures)

    def to_json(self) -> dict:
        return {"morphism": self.name, "ok": self.ok, "chain_map": self.chain_map_failures,
                "projection_formula": self.projection_failures, "adjunction": self.adjunction_failures}


def chain_map_failures(f: AlgebraMorphism, reduced: bool = True) -> List[dict]:
    """Generators h with f_* delta_X(h) != delta_Y(f_* h)."""
    X, Y = f.source, f.target
    keep = set(_classes(Y, reduced))
    bad = []
    for h in _classes(X, reduced):
        lhs = push_tensor(f, delta_generator(X, {h: Fraction(1)}, reduced), reduced)
        fh = {b: c for b, c in f.push_hom({h: Fraction(1)}).items() if b in keep}
        rhs = delta_generator(Y, fh, reduced) if fh else {}
        if lhs != rhs:
            bad.append({"generator": X.basis[h].label,
                        "lhs": {"|".join(Y.basis[a].label for a in w): str(c) for w, c in lhs.items()},
                        "rhs": {"|".join(Y.basis[a].label for a in w): str(c) for w, c in rhs.items()}})
    return bad


def projection_formula_failures(f: AlgebraMorphism) -> List[dict]:
    """f_!(alpha . f* gamma) = f_!(alpha) . gamma on all basis pairs."""
    X, Y = f.source, f.target
    bad = []
    for i in range(X.dim):
        for j in range(Y.dim):
            lhs = f.shriek_coh(X.mul({i: Fraction(1)}, f.pullback[j]))
            rhs = Y.mul(f.shriek_coh({i: Fraction(1)}), {j: Fraction(1)})
            if lhs != rhs:
                bad.append({"alpha": X.basis[i].label, "gamma": Y.basis[j].label})
    return bad


def adjunction_failures(f: AlgebraMorphism) -> List[dict]:
    """<c0 cap H_Y cap f_* h>_Y = <f^! c0 cap H_X cap h>_X on all basis pairs."""
    X, Y = f.source, f.target
    bad = []
    for j in range(Y.dim):
        c0 = {j: Fraction(1)}
        fc0 = f.shriek_hom(c0)
        for h in range(X.dim):
            lhs = hom_pairing(Y, c0, f.push_hom({h: Fraction(1)}))
            rhs = hom_pairing(X, fc0, {h: Fraction(1)})
            if lhs != rhs:
                bad.append({"c0": Y.basis[j].label, "h": X.basis[h].label, "lhs": str(lhs), "rhs": str(rhs)})
    return bad


def functoriality_report(f: AlgebraMorphism, reduced: bool = True) -> FunctorialityReport:
    return FunctorialityReport(f.name, chain_map_failures(f, reduced), projection_formula_failures(f),
                               adjunction_failures(f))
