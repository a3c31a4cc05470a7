"""Tree sums of Green currents on flat tori: correlator values and the class G.

For a plane trivalent tree T with legs 0..m decorated by forms a_0..a_m, the
integrand on X^{internal vertices} is

    kappa_T = sign * op(G_{E_0}, ..., G_{E_k}) ^ a_0 ^ ... ^ a_m,     k = m - 3,

where op is omega (default), xi or eta, G_E is the Green current pulled back
along the edge and a_j sits at the internal vertex of leg j.  The sign is

    (-1)^{s + t + (k+1) sum deg a_j} * or_T,   s = sum_j j (deg G_j + 1),
                                               t = sum_j j deg a_j,

which collects the odd edge generators to the right and compares the result
with the clockwise orientation (edges are stored internal-first, then by leg).

Every differentiated Green current splits into one term per endpoint (and per
complex coordinate on surfaces); after wedging constant exterior monomials only
the top-degree coefficient survives, so each tree reduces to a finite list of
scalar integrals  int prod_E f_E(x_a, x_b) prod_v L_v(x_v)  over X^V.

Backends: the elliptic curve integrates these by Fourier message passing on a
mode box of half-width grid/2 (error from the grid/4 rerun); the abelian surface
uses Monte Carlo over edge offsets, valid for the volume normalization where
the integrand depends on differences only.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import fftconvolve

from .cyclic_words import (CyclicChain, aut_order, canonical_words, cohomology_alphabet,
                           homology_alphabet, normalize, separation_sign, shuffles)
from .form_calculus import (ID, FourierForm, Torus, expand, harmonic_form, mask_sign, popcount)
from .green_kernels import dz_eigen, dzbar_eigen, g_batch, ghat
from .pd_algebra import PDAlgebra
from .plane_trees import PlaneTree, enumerate_trees

ENGINE_VERSION = "1"


class WordTooShort(ValueError):
    pass


class QuadratureDivergence(RuntimeError):
    pass


class UnsupportedBackend(ValueError):
    pass


# ------------------------------------------------------------------ config

@dataclass(frozen=True)
class EngineConfig:
    taus: Tuple[Tuple[float, float], ...] = ((0.5, math.sqrt(3) / 2),)
    mu: str = "volume"
    point: Tuple[float, ...] = ()
    grid: int = 64
    flavor: str = "omega"
    mc_samples: int = 100_000
    seed: int = 7
    s0: float = 0.5
    ball_radius: float = 0.25
    gauge_shift: Tuple = ()  # (band, seed, scale) of a random d-exact perturbation

    @property
    def torus(self) -> Torus:
        return Torus(tuple(complex(a, b) for a, b in self.taus))

    @property
    def a_point(self) -> np.ndarray:
        if self.point:
            return np.asarray(self.point, dtype=float)
        return np.zeros(2 * len(self.taus))

    def to_json(self) -> dict:
        d = asdict(self)
        d["taus"] = [list(t) for t in self.taus]
        d["point"] = list(self.point)
        d["gauge_shift"] = list(self.gauge_shift)
        return d

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]


def elliptic_config(tau: complex = complex(0.5, math.sqrt(3) / 2), **kw) -> EngineConfig:
    return EngineConfig(taus=((tau.real, tau.imag),), **kw)


def surface_config(tau1: complex = complex(0.5, math.sqrt(3) / 2), tau2: Optional[complex] = None,
                   **kw) -> EngineConfig:
    tau2 = tau1 if tau2 is None else tau2
    return EngineConfig(taus=((tau1.real, tau1.imag), (tau2.real, tau2.imag)), **kw)


@dataclass
class Estimate:
    value: complex
    error: float
    reason: str = ""

    def to_json(self) -> dict:
        return {"value": [self.value.real, self.value.imag], "abs_error": self.error,
                **({"reason": self.reason} if self.reason else {})}


# ------------------------------------------------------------ degree filter

def _letter_pq(A: PDAlgebra, a: int) -> Tuple[int, int]:
    b = A.basis[a]
    return b.p, b.q


def may_contribute(W: Sequence[int], A: PDAlgebra) -> bool:
    """Degree and Hodge-bidegree filter for a cyclic word of harmonic classes.

    For m + 1 >= 4 letters: sum (deg - 1) = 2n - 2, sum p > n and sum q > n.
    For three letters the single-vertex integral needs total bidegree (n, n).
    """
    n = A.n
    if any(not (0 < A.deg(a) < 2 * n) for a in W):
        return False
    P = sum(_letter_pq(A, a)[0] for a in W)
    Q = sum(_letter_pq(A, a)[1] for a in W)
    if len(W) == 3:
        return P == n and Q == n
    return sum(A.deg(a) - 1 for a in W) == 2 * n - 2 and P > n and Q > n


def dimension_count(A: PDAlgebra, W: Sequence[int]) -> Tuple[int, int]:
    """(form degree of kappa_T, dimension of X^{internal vertices}) for |W| >= 4."""
    n, m = A.n, len(W) - 1
    form = (2 * n - 2) * (m - 2) + (m - 3) + sum(A.deg(a) for a in W)
    return form, 2 * n * (m - 1)


# ------------------------------------------------------------- leg forms

LegComp = Tuple[int, object]  # (local mask, scalar or coefficient array)


def _leg_components(f: FourierForm) -> List[LegComp]:
    out = []
    c = (f.band,) * f.torus.real_dim
    for mask, arr in sorted(f.comps.items()):
        if not np.any(arr != 0):
            continue
        rest = arr.copy()
        rest[c] = 0
        if np.any(rest != 0):
            out.append((mask, arr))
        else:
            out.append((mask, complex(arr[c])))
    return out


def harmonic_legs(torus: Torus, A: PDAlgebra, W: Sequence[int]) -> List[FourierForm]:
    return [harmonic_form(torus, A.basis[a].label) for a in W]


# ------------------------------------------------------------ expansion

Desc = tuple  # ("id",) or (op, end, j)


def _green_monomials(torus: Torus, a: int, b: int) -> List[Tuple[int, complex]]:
    """Constant form part of G on the edge (a, b): 1 on curves, s^*(w_1 + w_2) on surfaces."""
    n = torus.n
    if n == 1:
        return [(0, 1.0)]
    acc: Dict[int, complex] = {}
    for j, tau in enumerate(torus.taus):
        c = 1j / (2 * tau.imag)
        for (u, su), (v, sv) in itertools.product(((a, 1), (b, -1)), repeat=2):
            g1 = 1 << (u * 2 * n + 2 * j)
            g2 = 1 << (v * 2 * n + 2 * j + 1)
            s = mask_sign(g1, g2)
            if s:
                acc[g1 | g2] = acc.get(g1 | g2, 0) + s * su * sv * c
    return [(m, c) for m, c in acc.items() if c != 0]


def _edge_pieces(torus: Torus, a: int, b: int, op: str) -> List[Tuple[Desc, int, complex]]:
    n = torus.n
    base = _green_monomials(torus, a, b)
    if op == ID:
        return [(("id",), m, c) for m, c in base]
    out = []
    for end, v in enumerate((a, b)):
        for j in range(n):
            gm = 1 << (v * 2 * n + 2 * j + (0 if op == "d" else 1))
            for m, c in base:
                s = mask_sign(gm, m)
                if s:
                    out.append(((op, end, j), gm | m, s * c))
    return out


def tree_sign(T: PlaneTree, leg_degrees: Sequence[int], green_degree: int) -> int:
    k = len(T.internal_edges) - 1
    s = sum(j * (green_degree + 1) for j in range(k + 1))
    t = sum(j * d for j, d in enumerate(leg_degrees))
    e = s + t + (k + 1) * sum(leg_degrees)
    return (-1) ** (e % 2) * T.orientation_sign


def expand_tree(T: PlaneTree, torus: Torus, legs: Sequence[List[LegComp]], flavor: str = "omega",
                leg_degrees: Optional[Sequence[int]] = None) -> Dict[tuple, complex]:
    """{(edge descriptors, leg choice): coefficient} of the top-degree part of kappa_T.

    The leg choice records which array-valued leg components were picked; scalar
    components are folded into the coefficient.  The integral of the top monomial
    over X^V (prod of top_integral per vertex) is folded in as well.
    """
    n = torus.n
    V = T.num_legs - 2
    top = (1 << (2 * n * V)) - 1
    pairs = T.internal_pairs()
    edeg = 0 if n == 1 else 2
    if leg_degrees is None:
        leg_degrees = [popcount(comps[0][0]) if comps else 0 for comps in legs]
    sign = tree_sign(T, leg_degrees, edeg)
    vol = torus.top_integral() ** V
    out: Dict[tuple, complex] = {}
    leg_opts = []
    for j, comps in enumerate(legs):
        v = T.leg_vertex(j)
        leg_opts.append([(i, mask << (v * 2 * n), val) for i, (mask, val) in enumerate(comps)])
    if pairs:
        ops = expand(flavor, len(pairs) - 1)
        terms = ops.slot_terms([edeg] * len(pairs))
    else:
        terms = {(): Fraction(1)}
    for assign, c in terms.items():
        piece_lists = [_edge_pieces(torus, a, b, op) for (a, b), op in zip(pairs, assign)]

        def walk(i: int, mask: int, coef: complex, descs: tuple):
            if i < len(piece_lists):
                for d, m, cm in piece_lists[i]:
                    s = mask_sign(mask, m)
                    if s:
                        yield from walk(i + 1, mask | m, coef * s * cm, descs + (d,))
                return
            yield from walk_legs(0, mask, coef, descs, ())

        def walk_legs(j: int, mask: int, coef: complex, descs: tuple, choice: tuple):
            if j == len(leg_opts):
                if mask == top:
                    yield descs, choice, coef
                return
            for idx, m, val in leg_opts[j]:
                s = mask_sign(mask, m)
                if not s:
                    continue
                if isinstance(val, np.ndarray):
                    yield from walk_legs(j + 1, mask | m, coef * s, descs, choice + ((j, idx),))
                else:
                    yield from walk_legs(j + 1, mask | m, coef * s * val, descs, choice)

        for descs, choice, coef in walk(0, 0, complex(float(c)), ()):
            key = (descs, choice)
            out[key] = out.get(key, 0) + sign * coef * vol
    return {k: v for k, v in out.items() if v != 0}


# ------------------------------------------------------ elliptic backend

class _EllipticTables:
    """Fourier tables of the pair and single-variable pieces of each edge descriptor."""

    def __init__(self, torus: Torus, band: int, mu: str, point: np.ndarray):
        self.torus, self.band, self.mu = torus, band, mu
        k = np.arange(-band, band + 1)
        ks, kt = np.meshgrid(k, k, indexing="ij")
        tau = torus.taus[0]
        self.gh = ghat(torus, band)
        self.eig = {"d": dz_eigen(tau, ks, kt), "db": dzbar_eigen(tau, ks, kt)}
        self.phase = np.exp(-2j * math.pi * (ks * point[0] + kt * point[1]))
        self._cache: Dict[Desc, tuple] = {}

    def pieces(self, d: Desc):
        """(pair, single at end 0, single at end 1); singles are None for the volume choice."""
        if d in self._cache:
            return self._cache[d]
        if d[0] == "id":
            pair = self.gh.astype(complex)
            s0 = s1 = -self.gh * self.phase
        else:
            op, end, _ = d
            mult = self.eig[op] * self.gh
            pair = mult if end == 0 else -mult
            s0 = -mult * self.phase if end == 0 else None
            s1 = -mult * self.phase if end == 1 else None
        if self.mu == "volume":
            s0 = s1 = None
        res = (pair, s0, s1)
        self._cache[d] = res
        return res


def _mul(a: np.ndarray, b: np.ndarray, band: int) -> np.ndarray:
    full = fftconvolve(a, b, mode="full")
    c = (full.shape[0] - 1) // 2
    return full[c - band:c + band + 1, c - band:c + band + 1]


def _delta0(band: int) -> np.ndarray:
    out = np.zeros((2 * band + 1,) * 2, dtype=complex)
    out[band, band] = 1.0
    return out


def _message_pass(V: int, pairs: Sequence[Tuple[int, int]], descs: Sequence[Desc],
                  vertex_funcs: Dict[int, np.ndarray], tables: _EllipticTables) -> complex:
    band = tables.band
    adj: Dict[int, List[int]] = {v: [] for v in range(V)}
    for e, (a, b) in enumerate(pairs):
        adj[a].append(e)
        adj[b].append(e)

    def visit(v: int, parent: Optional[int]) -> np.ndarray:
        F = vertex_funcs.get(v)
        F = _delta0(band) if F is None else F
        for e in adj[v]:
            if e == parent:
                continue
            a, b = pairs[e]
            c = b if a == v else a
            Fc = visit(c, e)
            pair, s0, s1 = tables.pieces(descs[e])
            v_end = 0 if a == v else 1
            M = (pair if v_end == 0 else pair[::-1, ::-1]) * Fc
            sv, sc = (s0, s1) if v_end == 0 else (s1, s0)
            if sv is not None:
                M = M + sv * Fc[band, band]
            if sc is not None:
                M = M.copy()
                M[band, band] += np.sum(sc * Fc[::-1, ::-1])
            F = _mul(F, M, band)
        return F

    return complex(visit(0, None)[band, band])


def _vertex_functions(T: PlaneTree, legs: Sequence[List[LegComp]], choice: tuple, band: int):
    out: Dict[int, np.ndarray] = {}
    for j, idx in choice:
        arr = legs[j][idx][1]
        B = (arr.shape[0] - 1) // 2
        if B < band:
            arr = np.pad(arr, band - B)
        elif B > band:
            arr = arr[B - band:B + band + 1, B - band:B + band + 1]
        v = T.leg_vertex(j)
        out[v] = arr if v not in out else _mul(out[v], arr, band)
    return out


# --------------------------------------------------------- surface backend

def _sample_offsets(torus: Torus, rng: np.random.Generator, N: int, R0: float):
    """Mixture of uniform and a radial ball around 0 (in volume-preserving w-coordinates)."""
    d = torus.real_dim
    U = rng.random((N, d))
    pick = rng.random(N) < 0.5
    nb = int(pick.sum())
    g = rng.standard_normal((nb, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = R0 * rng.random(nb)
    w = g * r[:, None]
    ball = np.empty((nb, d))
    for j, tau in enumerate(torus.taus):
        z = (w[:, 2 * j] + 1j * w[:, 2 * j + 1]) * math.sqrt(tau.imag)
        t = z.imag / tau.imag
        ball[:, 2 * j] = z.real - tau.real * t
        ball[:, 2 * j + 1] = t
    U[pick] = ball
    return U


def _mixture_density(torus: Torus, U: np.ndarray, R0: float) -> np.ndarray:
    u = U - np.round(U)
    r2 = np.zeros(len(u))
    for j, tau in enumerate(torus.taus):
        z = u[:, 2 * j] + tau * u[:, 2 * j + 1]
        r2 += np.abs(z) ** 2 / tau.imag
    r = np.sqrt(r2)
    d = torus.real_dim
    sphere = 2 * math.pi if d == 2 else 2 * math.pi ** 2  # surface measure of the unit sphere
    inside = r < R0
    ball = np.zeros(len(u))
    ball[inside] = 1.0 / (sphere * r[inside] ** (d - 1) * R0)
    return 0.5 + 0.5 * ball


def _edge_function(torus: Torus, d: Desc, U: np.ndarray, s0: float) -> np.ndarray:
    if d[0] == "id":
        return g_batch(torus, U, "id", s0)
    op, end, j = d
    name = ("dz" if op == "d" else "dzb") + str(j + 1)
    vals = g_batch(torus, U, name, s0)
    return vals if end == 0 else -vals


# ------------------------------------------------------------------ engine

@dataclass
class CorrelatorEngine:
    A: PDAlgebra
    cfg: EngineConfig
    _trees: Dict[int, List[PlaneTree]] = field(default_factory=dict, repr=False)
    _cache: Dict[tuple, Estimate] = field(default_factory=dict, repr=False)
    _tables: Dict[int, _EllipticTables] = field(default_factory=dict, repr=False)
    _gauge: Optional[FourierForm] = field(default=None, repr=False)

    def __post_init__(self):
        if self.cfg.torus.n != self.A.n:
            raise UnsupportedBackend("model and torus dimensions differ")
        if self.cfg.torus.n == 2 and self.cfg.mu != "volume":
            raise UnsupportedBackend("the surface backend ships the volume normalization only")
        if self.cfg.flavor not in ("omega", "xi", "eta"):
            raise ValueError(f"unknown flavor {self.cfg.flavor!r}")

    @property
    def torus(self) -> Torus:
        return self.cfg.torus

    def trees(self, legs: int) -> List[PlaneTree]:
        if legs not in self._trees:
            self._trees[legs] = enumerate_trees(legs)
        return self._trees[legs]

    def tables(self, band: int) -> _EllipticTables:
        if band not in self._tables:
            self._tables[band] = _EllipticTables(self.torus, band, self.cfg.mu, self.cfg.a_point)
        return self._tables[band]

    # scalar integrals ------------------------------------------------
    def _levels(self) -> Tuple[int, ...]:
        if self.torus.n == 1:
            return tuple(max(self.cfg.grid // f, 1) for f in (2, 4, 8))
        return (0,)

    def _integral(self, t_idx: int, T: PlaneTree, descs: tuple, choice: tuple,
                  legs: Sequence[List[LegComp]]) -> Tuple[np.ndarray, float]:
        """Values at each refinement level, plus a statistical error (surface backend)."""
        key = (T.num_legs, t_idx, descs) if not choice else None
        if key is not None and key in self._cache:
            return self._cache[key]
        if self.torus.n == 1:
            V = T.num_legs - 2
            pairs = T.internal_pairs()
            vals = []
            for band in self._levels():
                funcs = _vertex_functions(T, legs, choice, band)
                vals.append(_message_pass(V, pairs, descs, funcs, self.tables(band)))
            res = (np.array(vals), 0.0)
        else:
            if choice:
                raise UnsupportedBackend("the surface backend takes constant legs only")
            est = self._mc_integral(t_idx, T, descs)
            res = (np.array([est.value]), est.error)
        if key is not None:
            self._cache[key] = res
        return res

    def _mc_integral(self, t_idx: int, T: PlaneTree, descs: tuple) -> Estimate:
        # volume normalization: the integrand depends on edge differences only, so
        # int over X^V of prod_E f_E(x_a - x_b) is prod_E int_X f_E
        R0 = self.cfg.ball_radius * min(min(1.0, abs(t)) / math.sqrt(t.imag) for t in self.torus.taus)
        val, parts = 1.0 + 0j, []
        for e, d in enumerate(descs):
            rng = np.random.default_rng([self.cfg.seed, T.num_legs, t_idx, e])
            U = _sample_offsets(self.torus, rng, self.cfg.mc_samples, R0)
            w = _edge_function(self.torus, d, U, self.cfg.s0) / _mixture_density(self.torus, U, R0)
            mean = complex(np.mean(w))
            err = float(np.std(w) / math.sqrt(len(w)))
            parts.append((mean, err))
            val *= mean
        err = 0.0
        for i, (_, e) in enumerate(parts):
            e_i = e
            for l, (x, el) in enumerate(parts):
                if l != i:
                    e_i *= abs(x) + el
            err += e_i
        return Estimate(val, err)

    def _finish(self, levels: np.ndarray, stat: float) -> Estimate:
        v = complex(levels[0])
        scale = max(abs(v), 1.0)
        if len(levels) == 1:
            return Estimate(v, stat + 1e-14 * scale)
        d1, d2 = abs(levels[0] - levels[1]), abs(levels[1] - levels[2])
        if d1 > d2 + 1e-9 * scale:
            raise QuadratureDivergence(f"refinement deltas {d2:.3e} -> {d1:.3e} do not contract")
        return Estimate(v, float(d1) + 1e-14 * scale)

    # trees -------------------------------------------------------------
    def kappa_levels(self, t_idx: int, T: PlaneTree, legs: Sequence[FourierForm],
                     leg_degrees: Optional[Sequence[int]] = None) -> Tuple[np.ndarray, float]:
        comps = [_leg_components(f) for f in legs]
        if leg_degrees is None:
            leg_degrees = [f.degree() for f in legs]
        terms = expand_tree(T, self.torus, comps, self.cfg.flavor, leg_degrees)
        total = np.zeros(len(self._levels()), dtype=complex)
        err = 0.0
        for (descs, choice), c in terms.items():
            vals, e = self._integral(t_idx, T, descs, choice, comps)
            total = total + c * vals
            err += abs(c) * e
        if self.cfg.gauge_shift and T.internal_edges:
            total = total + self._gauge_term(T, legs)
        return total, err

    def kappa_integral(self, t_idx: int, T: PlaneTree, legs: Sequence[FourierForm],
                       leg_degrees: Optional[Sequence[int]] = None) -> Estimate:
        return self._finish(*self.kappa_levels(t_idx, T, legs, leg_degrees))

    def tree_sum(self, legs: Sequence[FourierForm], leg_degrees: Optional[Sequence[int]] = None) -> Estimate:
        if len(legs) < 3:
            raise WordTooShort("correlators need at least three letters")
        total = np.zeros(len(self._levels()), dtype=complex)
        err = 0.0
        for i, T in enumerate(self.trees(len(legs))):
            lv, e = self.kappa_levels(i, T, legs, leg_degrees)
            total = total + lv
            err += e
        return self._finish(total, err)

    # words ---------------------------------------------------------------
    def correlator(self, W: Sequence[int], force: bool = False) -> Estimate:
        """Cor of the cyclic word W of harmonic classes (graded-cyclic invariant)."""
        if len(W) < 3:
            raise WordTooShort("correlators need at least three letters")
        alpha = cohomology_alphabet(self.A)
        nw, s = normalize(alpha, W)
        if nw is None:
            return Estimate(0j, 0.0, "zero-word")
        if not force and not may_contribute(nw, self.A):
            return Estimate(0j, 0.0, "degree-filter")
        legs = harmonic_legs(self.torus, self.A, nw)
        est = self.tree_sum(legs, [self.A.deg(a) for a in nw])
        return Estimate(s * est.value, est.error)

    # gauge perturbation ----------------------------------------------------
    def gauge_form(self) -> FourierForm:
        """Symmetric random d-exact perturbation dB of G on X x X (B of degree deg G - 1)."""
        if self._gauge is None:
            band, seed, scale = self.cfg.gauge_shift
            T2 = Torus(tuple(self.torus.taus) * 2)
            edeg = 0 if self.torus.n == 1 else 2
            if edeg == 0:
                self._gauge = FourierForm.zero(T2, band)
            else:
                rng = np.random.default_rng(seed)
                B = FourierForm.random(T2, band, edeg - 1, rng).scale(scale)
                B = B + _swap_factors(B)
                self._gauge = B.partial()
        return self._gauge

    def _gauge_term(self, T: PlaneTree, legs: Sequence[FourierForm]) -> complex:
        if len(T.internal_edges) != 1:
            raise UnsupportedBackend("gauge perturbations are wired for single-edge trees")
        n = self.torus.n
        T2 = Torus(tuple(self.torus.taus) * 2)
        dB = self.gauge_form()
        sign = tree_sign(T, [f.degree() for f in legs], 0 if n == 1 else 2)
        form = dB
        for j, f in enumerate(legs):
            v = T.leg_vertex(j)
            lifted = FourierForm(T2, 0, {m << (2 * n * v): np.array(f.comps[m][(f.band,) * (2 * n)]).reshape((1,) * (4 * n))
                                         for m in f.comps})
            form = form.wedge(lifted)
        return sign * form.integrate()


def _swap_factors(f: FourierForm) -> FourierForm:
    """Pull back along (x, y) -> (y, x) on X x X."""
    d2 = f.torus.real_dim // 2
    gens = d2  # generators per factor equal real coordinates per factor
    out: Dict[int, np.ndarray] = {}
    for m, arr in f.comps.items():
        lo, hi = m & ((1 << gens) - 1), m >> gens
        nm = (lo << gens) | hi
        # dx_lo ^ dy_hi pulls back to dy_lo ^ dx_hi, a block transposition
        s = (-1) ** (popcount(lo) * popcount(hi))
        arr2 = np.transpose(arr, list(range(d2, 2 * d2)) + list(range(d2)))
        out[nm] = out[nm] + s * arr2 if nm in out else s * arr2
    return FourierForm(f.torus, f.band, out, f.cap)


# ------------------------------------------------------------- the class G

@dataclass
class CorrelatorTable:
    model: str
    config: EngineConfig
    entries: Dict[Tuple[int, ...], Estimate]

    def to_json(self, A: PDAlgebra) -> dict:
        return {
            "model": self.model,
            "engine_version": ENGINE_VERSION,
            "config": self.config.to_json(),
            "config_hash": self.config.digest(),
            "entries": {"C(" + ",".join(A.basis[a].label for a in w) + ")": e.to_json()
                        for w, e in sorted(self.entries.items())},
        }

    @staticmethod
    def from_json(A: PDAlgebra, data: dict) -> "CorrelatorTable":
        from .cyclic_words import parse_word
        cfg = data["config"]
        conf = EngineConfig(taus=tuple(tuple(t) for t in cfg["taus"]), mu=cfg["mu"],
                            point=tuple(cfg["point"]), grid=cfg["grid"], flavor=cfg["flavor"],
                            mc_samples=cfg["mc_samples"], seed=cfg["seed"], s0=cfg["s0"],
                            ball_radius=cfg["ball_radius"], gauge_shift=tuple(cfg["gauge_shift"]))
        entries = {}
        for key, e in data["entries"].items():
            w, _ = parse_word(A, key)
            entries[w] = Estimate(complex(*e["value"]), e["abs_error"], e.get("reason", ""))
        return CorrelatorTable(data["model"], conf, entries)


@dataclass
class CorrelatorClass:
    table: CorrelatorTable
    G: CyclicChain
    errors: Dict[Tuple[int, ...], float]


def cohomology_words(A: PDAlgebra, length: int) -> List[Tuple[int, ...]]:
    return canonical_words(cohomology_alphabet(A), length)


def assemble_class(A: PDAlgebra, entries: Dict[Tuple[int, ...], Estimate]) -> Tuple[CyclicChain, Dict[Tuple[int, ...], float]]:
    """G = sum_W |Aut W|^{-1} eps(W) Cor(W) [W^vee] (x) H and per-word error budget."""
    alpha_h = homology_alphabet(A)
    G = CyclicChain(alpha_h, {}, True)
    errors: Dict[Tuple[int, ...], float] = {}
    for w, est in entries.items():
        nw, _ = normalize(alpha_h, w)
        if nw is None:
            continue
        coef = est.value * separation_sign(alpha_h, w) / aut_order(w)
        if coef != 0:
            G.add_word(w, coef)
        if est.error:
            errors[nw] = errors.get(nw, 0.0) + est.error / aut_order(w)
    return G, errors


def correlator_class(A: PDAlgebra, cfg: EngineConfig, weight_cap: int,
                     engine: Optional[CorrelatorEngine] = None, min_weight: int = 3,
                     filtered_only: bool = True) -> CorrelatorClass:
    """Correlator table and class G over cyclic words of length min_weight..weight_cap."""
    if weight_cap < 3:
        raise ValueError("weight_cap must be at least 3")
    eng = engine or CorrelatorEngine(A, cfg)
    entries: Dict[Tuple[int, ...], Estimate] = {}
    for L in range(min_weight, weight_cap + 1):
        for w in cohomology_words(A, L):
            if filtered_only and not may_contribute(w, A):
                continue
            entries[w] = eng.correlator(w)
    G, errors = assemble_class(A, entries)
    return CorrelatorClass(CorrelatorTable(A.name, cfg, entries), G, errors)


# ---------------------------------------------------------- shuffle checks

def shuffle_residual(eng: CorrelatorEngine, v0: int, left: Sequence[int], right: Sequence[int]) -> Estimate:
    """sum over (p,q)-shuffles of +-Cor(v0 v_sigma(1) ... v_sigma(p+q)) with Koszul signs."""
    alpha = cohomology_alphabet(eng.A)
    total, err = 0j, 0.0
    for s, w in shuffles(alpha, left, right):
        est = eng.correlator((v0,) + tuple(w))
        total += s * est.value
        err += est.error
    return Estimate(total, err)


def chain_error(A: PDAlgebra, errors: Dict[Tuple[int, ...], float], op) -> Dict[Tuple[int, ...], float]:
    """Propagate per-word absolute errors through a linear map on homology chains."""
    alpha_h = homology_alphabet(A)
    out: Dict[Tuple[int, ...], float] = {}
    for w, e in errors.items():
        img = op(CyclicChain(alpha_h, {w: Fraction(1)}, True))
        for u, c in img.terms.items():
            out[u] = out.get(u, 0.0) + abs(complex(c)) * e
    return out


# ------------------------------------------------------- closedness, gauge

@dataclass
class ChainReport:
    """Component-wise comparison of a float chain against an error budget."""
    residual: Dict[Tuple[int, ...], complex]
    budget: Dict[Tuple[int, ...], float]

    def worst(self) -> float:
        return max((abs(v) for v in self.residual.values()), default=0.0)

    def passes(self, factor: float = 3.0, atol: float = 0.0) -> bool:
        return all(abs(v) <= factor * self.budget.get(w, 0.0) + atol for w, v in self.residual.items())


def delta_residual(A: PDAlgebra, cls: CorrelatorClass) -> ChainReport:
    """delta G with the per-component error pushed through delta."""
    from .free_lie import delta_op
    op = lambda F: delta_op(A, F)
    dG = op(cls.G)
    res = {w: complex(c) for w, c in dG.terms.items()}
    return ChainReport(res, chain_error(A, cls.errors, op))


def fit_coboundary(A: PDAlgebra, diff: CyclicChain, length: int) -> Tuple[CyclicChain, ChainReport]:
    """Least-squares B on homology words of the given length minimising |diff - delta B|."""
    from .free_lie import delta_op
    alpha_h = homology_alphabet(A)
    basis = [w for w in canonical_words(alpha_h, length) if normalize(alpha_h, w)[0] is not None]
    images = [delta_op(A, CyclicChain(alpha_h, {w: Fraction(1)}, True)) for w in basis]
    rows = sorted(set(diff.terms).union(*(im.terms for im in images)))
    idx = {w: i for i, w in enumerate(rows)}
    M = np.zeros((len(rows), len(basis)), dtype=complex)
    for j, im in enumerate(images):
        for w, c in im.terms.items():
            M[idx[w], j] = complex(c)
    rhs = np.zeros(len(rows), dtype=complex)
    for w, c in diff.terms.items():
        rhs[idx[w]] = complex(c)
    if basis and rows:
        x = np.linalg.lstsq(M, rhs, rcond=None)[0]
    else:
        x = np.zeros(len(basis), dtype=complex)
    B = CyclicChain(alpha_h, {}, True)
    for w, c in zip(basis, x):
        if abs(c) > 1e-15:
            B.add_word(w, complex(c))
    r = rhs - M @ x if rows else rhs
    return B, ChainReport({w: complex(r[i]) for w, i in idx.items()}, {})
