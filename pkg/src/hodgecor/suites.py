"""Exact property suites shared by the ``verify`` verb and the test-suite.

Each suite draws seeded random chains, checks an identity over exact scalars
and returns a report listing counterexamples (as JSON chains).
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List

from . import cyclic_words as cw
from . import free_lie as fl
from .functoriality import functoriality_report
from .pd_algebra import PDAlgebra, get_model, shipped_morphisms


@dataclass
class SuiteReport:
    suite: str
    model: str
    checks: int = 0
    failures: List[dict] = field(default_factory=list)
    seconds: float = 0.0
    extra: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.suite, "model": self.model, "checks": self.checks,
                "failures": self.failures, "seconds": round(self.seconds, 3), **self.extra}


def _chain(alpha, rng, max_weight):
    return cw.random_chain(alpha, rng, max_weight, 3, min_len=2)


def jacobi(A: PDAlgebra, n: int = 100, max_weight: int = 4, seed: int = 0) -> SuiteReport:
    """{F,{G,H}} = {{F,G},H} + (-1)^{|F||G|} {G,{F,H}}."""
    rng = random.Random(seed)
    alpha = cw.homology_alphabet(A)
    rep = SuiteReport("jacobi", A.name)
    for _ in range(n):
        F, G, H = (_chain(alpha, rng, max_weight) for _ in range(3))
        f, g = F.degree(), G.degree()
        lhs = fl.bracket(A, F, fl.bracket(A, G, H))
        rhs = fl.bracket(A, fl.bracket(A, F, G), H) + fl.bracket(A, G, fl.bracket(A, F, H)).scale((-1) ** (f * g))
        rep.checks += 1
        res = lhs - rhs
        if not res.is_zero():
            rep.failures.append({"F": F.to_json(), "G": G.to_json(), "H": H.to_json(), "residual": res.to_json()})
    return rep


def antisymmetry(A: PDAlgebra, n: int = 200, max_weight: int = 4, seed: int = 0) -> SuiteReport:
    """{F,G} + (-1)^{|F||G|} {G,F} = 0."""
    rng = random.Random(seed)
    alpha = cw.homology_alphabet(A)
    rep = SuiteReport("antisym", A.name)
    for _ in range(n):
        F, G = _chain(alpha, rng, max_weight), _chain(alpha, rng, max_weight)
        res = fl.bracket(A, F, G) + fl.bracket(A, G, F).scale((-1) ** (F.degree() * G.degree()))
        rep.checks += 1
        if not res.is_zero():
            rep.failures.append({"F": F.to_json(), "G": G.to_json(), "residual": res.to_json()})
    return rep


def delta_square(A: PDAlgebra, n: int = 200, max_weight: int = 6, seed: int = 0) -> SuiteReport:
    """{Delta,Delta} = 0, delta^2 = 0 on CLie (x) H and cyclic_delta^2 = 0 on the dual side."""
    rng = random.Random(seed)
    alpha = cw.homology_alphabet(A)
    co = cw.cohomology_alphabet(A)
    D = fl.canonical_delta(A, alpha)
    rep = SuiteReport("delta2", A.name)
    DD = fl.bracket(A, D, D)
    rep.checks += 1
    if not DD.is_zero():
        rep.failures.append({"check": "{Delta,Delta}", "residual": DD.to_json()})
    for _ in range(n):
        F = cw.random_chain(alpha, rng, max_weight, 3, min_len=2)
        res = fl.delta_op(A, fl.delta_op(A, F, D), D)
        rep.checks += 1
        if not res.is_zero():
            rep.failures.append({"check": "delta^2", "F": F.to_json(), "residual": res.to_json()})
        Fc = cw.random_chain(co, rng, max_weight, 3, min_len=2)
        res = cw.cyclic_delta(A, cw.cyclic_delta(A, Fc))
        rep.checks += 1
        if not res.is_zero():
            rep.failures.append({"check": "cyclic_delta^2", "F": Fc.to_json(), "residual": res.to_json()})
    return rep


def theta_hom(A: PDAlgebra, n: int = 100, max_weight: int = 4, seed: int = 0) -> SuiteReport:
    """[theta_F, theta_G] = theta_{F,G}."""
    rng = random.Random(seed)
    alpha = cw.homology_alphabet(A)
    rep = SuiteReport("theta-hom", A.name)
    for _ in range(n):
        F, G = _chain(alpha, rng, max_weight), _chain(alpha, rng, max_weight)
        lhs = fl.commutator(fl.theta(A, F), fl.theta(A, G))
        T = fl.theta(A, fl.bracket(A, F, G))
        rhs = fl.Derivation(alpha, T.images, T.degree)
        rep.checks += 1
        if lhs != rhs:
            rep.failures.append({"F": F.to_json(), "G": G.to_json()})
    return rep


def iso_dims(A: PDAlgebra, max_weight: int = 5, variant: str = "H") -> SuiteReport:
    rep = SuiteReport("iso-dims", A.name)
    slices = []
    for r in fl.iso_dimensions(A, max_weight, variant):
        rep.checks += 1
        slices.append({"length": r.slice_key[0], "degree": r.slice_key[1], "class_degree": r.slice_key[2],
                       "clie": r.dim_clie, "der": r.dim_der, "theta_rank": r.theta_rank})
        if not r.ok:
            rep.failures.append(slices[-1])
    rep.extra["slices"] = slices
    return rep


def functoriality(A: PDAlgebra | None = None, reduced: bool = True) -> SuiteReport:
    rep = SuiteReport("functoriality", "shipped-morphisms")
    morphisms = []
    for f in shipped_morphisms():
        r = functoriality_report(f, reduced=reduced)
        rep.checks += 3
        morphisms.append(r.to_json())
        for kind in ("chain_map", "projection", "adjunction"):
            for bad in getattr(r, f"{kind}_failures"):
                rep.failures.append({"morphism": r.name, "check": kind, **bad})
    rep.extra["morphisms"] = morphisms
    rep.extra["reduced"] = reduced
    return rep


SUITES: Dict[str, Callable[..., SuiteReport]] = {
    "jacobi": jacobi,
    "antisym": antisymmetry,
    "delta2": delta_square,
    "theta-hom": theta_hom,
    "iso-dims": iso_dims,
    "functoriality": functoriality,
}


def run_suite(name: str, model: str = "ab-surface", weight: int | None = None, seed: int = 0,
              n: int | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    A = get_model(model)
    kw: Dict[str, object] = {}
    if name == "functoriality":
        t0 = time.perf_counter()
        rep = functoriality(A)
        rep.seconds = time.perf_counter() - t0
        return rep
    if weight is not None:
        kw["max_weight"] = weight
    if name != "iso-dims":
        kw["seed"] = seed
        if n is not None:
            kw["n"] = n
    t0 = time.perf_counter()
    rep = SUITES[name](A, **kw)
    rep.seconds = time.perf_counter() - t0
    return rep
