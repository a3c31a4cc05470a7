"""Finite-dimensional DG schemes g_H[1] = H (x) g shifted, and vector fields on them.

Functions on L[1] form a free graded-commutative algebra on coordinates x_I of
degree 1 - |e_I|.  Polynomials are dicts from sorted variable tuples to
scalars; a vector field is a derivation stored by the images of the
coordinates.  Everything built on a universal point

    alpha = sum_I x_I e_I  in  O (x) L,

so the Chern-Simons field is read off from Q(alpha) = d alpha + 1/2 [alpha, alpha]
and a derivation D of a free Lie algebra is transported through the
universal Lie map phi(a) = sum_i x_{a,i} t_i.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import scalars
from .cyclic_words import CyclicChain
from .form_calculus import FourierForm
from .free_lie import Derivation, theta
from .pd_algebra import PDAlgebra

Mono = Tuple[int, ...]
Poly = Dict[Mono, object]


class MissingEntries(KeyError):
    pass


class SplittingViolation(ValueError):
    pass


# --------------------------------------------------------- graded polynomials

@dataclass(frozen=True)
class Coordinates:
    degrees: Tuple[int, ...]
    labels: Tuple[str, ...] = ()
    bidegrees: Tuple[Tuple[int, int], ...] = ()
    weights: Tuple[int, ...] = ()

    def __len__(self):
        return len(self.degrees)

    def odd(self, v: int) -> bool:
        return bool(self.degrees[v] & 1)

    def mono_degree(self, m: Mono) -> int:
        return sum(self.degrees[v] for v in m)

    def mono_parity(self, m: Mono) -> int:
        return sum(1 for v in m if self.degrees[v] & 1) & 1


def _acc(p: dict, k, c) -> None:
    v = p.get(k, 0) + c
    if v == 0:
        p.pop(k, None)
    else:
        p[k] = v


def mono_mul(X: Coordinates, a: Mono, b: Mono) -> Tuple[int, Optional[Mono]]:
    """a * b = sign * merged, or (0, None) when an odd variable repeats."""
    sign = 1
    out = []
    i = j = 0
    # odd variables of a still waiting when an element of b is placed
    odd_a_left = sum(1 for v in a if X.odd(v))
    while i < len(a) or j < len(b):
        if j == len(b) or (i < len(a) and a[i] <= b[j]):
            if j < len(b) and a[i] == b[j] and X.odd(a[i]):
                return 0, None
            if X.odd(a[i]):
                odd_a_left -= 1
            out.append(a[i])
            i += 1
        else:
            if X.odd(b[j]) and odd_a_left % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    return sign, tuple(out)


def poly_mul(X: Coordinates, p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for a, c in p.items():
        for b, d in q.items():
            s, m = mono_mul(X, a, b)
            if s:
                _acc(out, m, s * c * d)
    return out


def poly_add(*ps: Poly) -> Poly:
    out: Poly = {}
    for p in ps:
        for m, c in p.items():
            _acc(out, m, c)
    return out


def poly_scale(p: Poly, s) -> Poly:
    return {m: s * c for m, c in p.items() if s * c != 0}


def var(v: int) -> Poly:
    return {(v,): Fraction(1)}


def ONE() -> Poly:
    return {(): Fraction(1)}


def derivative(X: Coordinates, p: Poly, v: int) -> Poly:
    """Left partial derivative d/dx_v."""
    out: Poly = {}
    for m, c in p.items():
        par = 0
        seen = False
        for j, u in enumerate(m):
            if u == v and not seen:
                mult = sum(1 for w in m if w == v)
                s = -1 if (X.odd(v) and par) else 1
                _acc(out, m[:j] + m[j + 1:], s * mult * c)
                seen = True
            if X.odd(u):
                par ^= 1
    return out


def poly_degree_parts(p: Poly) -> Dict[int, Poly]:
    out: Dict[int, Poly] = {}
    for m, c in p.items():
        out.setdefault(len(m), {})[m] = c
    return out


# ---------------------------------------------------------------- fields

@dataclass
class PolyVectorField:
    """Derivation of the function algebra, given by sum_K f_K d/dx_K."""
    coords: Coordinates
    comps: Dict[int, Poly] = field(default_factory=dict)
    degree: int = 0

    def apply(self, p: Poly) -> Poly:
        X = self.coords
        odd = self.degree & 1
        out: Poly = {}
        for m, c in p.items():
            par = 0
            for j, v in enumerate(m):
                img = self.comps.get(v)
                if img:
                    s = -1 if (odd and par) else 1
                    pre = {m[:j]: Fraction(1)}
                    post = {m[j + 1:]: Fraction(1)}
                    term = poly_mul(X, poly_mul(X, pre, img), post)
                    for mm, cc in term.items():
                        _acc(out, mm, s * c * cc)
                if X.odd(v):
                    par ^= 1
        return out

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        keys = set(self.comps) | set(other.comps)
        comps = {k: poly_add(self.comps.get(k, {}), other.comps.get(k, {})) for k in keys}
        return PolyVectorField(self.coords, {k: v for k, v in comps.items() if v}, self.degree)

    def scale(self, s) -> "PolyVectorField":
        return PolyVectorField(self.coords, {k: poly_scale(v, s) for k, v in self.comps.items()
                                             if poly_scale(v, s)}, self.degree)

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    def max_abs(self) -> float:
        return max((abs(complex(c)) for p in self.comps.values() for c in p.values()), default=0.0)

    def truncated(self, cap: int) -> "PolyVectorField":
        comps = {}
        for k, p in self.comps.items():
            q = {m: c for m, c in p.items() if len(m) <= cap}
            if q:
                comps[k] = q
        return PolyVectorField(self.coords, comps, self.degree)

    def components(self) -> Dict[int, "PolyVectorField"]:
        """Split by polynomial degree."""
        out: Dict[int, PolyVectorField] = {}
        for k, p in self.comps.items():
            for d, q in poly_degree_parts(p).items():
                out.setdefault(d, PolyVectorField(self.coords, {}, self.degree)).comps[k] = q
        return out

    def bidegrees(self) -> Dict[Tuple[int, int], int]:
        """Number of terms per Hodge bidegree sum_vars (p, q) - (p, q)_target."""
        X = self.coords
        out: Dict[Tuple[int, int], int] = {}
        if not X.bidegrees:
            return out
        for k, p in self.comps.items():
            for m in p:
                bp = sum(X.bidegrees[v][0] for v in m) - X.bidegrees[k][0]
                bq = sum(X.bidegrees[v][1] for v in m) - X.bidegrees[k][1]
                out[(bp, bq)] = out.get((bp, bq), 0) + 1
        return out

    def __eq__(self, other):
        return isinstance(other, PolyVectorField) and (self - other).is_zero()


def commutator(V: PolyVectorField, W: PolyVectorField) -> PolyVectorField:
    s = (-1) ** (V.degree * W.degree)
    X = V.coords
    comps = {}
    for k in range(len(X)):
        a = V.apply(W.comps.get(k, {}))
        b = W.apply(V.comps.get(k, {}))
        c = poly_add(a, poly_scale(b, -s))
        if c:
            comps[k] = c
    return PolyVectorField(X, comps, V.degree + W.degree)


def square(Q: PolyVectorField) -> PolyVectorField:
    """Q o Q as a derivation; equals 1/2 [Q, Q] for odd Q."""
    comps = {k: Q.apply(p) for k, p in Q.comps.items()}
    return PolyVectorField(Q.coords, {k: v for k, v in comps.items() if v}, 2 * Q.degree)


# ---------------------------------------------------------- Lie algebras

@dataclass
class QuadLieAlgebra:
    """Lie algebra with invariant nondegenerate form Q and a faithful matrix realisation."""
    name: str
    labels: List[str]
    struct: Dict[Tuple[int, int], Dict[int, Fraction]]
    form: List[List[Fraction]]
    rep: Optional[List[List[List[Fraction]]]] = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def bracket(self, i: int, j: int) -> Dict[int, Fraction]:
        return self.struct.get((i, j), {})

    def triple(self, i: int, j: int, k: int) -> Fraction:
        """<t_i, t_j, t_k> = Q(t_i, [t_j, t_k])."""
        return sum((c * self.form[i][l] for l, c in self.bracket(j, k).items()), Fraction(0))

    def jacobi_defect(self) -> int:
        bad = 0
        n = self.dim
        for a, b, c in itertools.product(range(n), repeat=3):
            tot: Dict[int, Fraction] = {}
            for (x, y, z) in ((a, b, c), (b, c, a), (c, a, b)):
                for l, u in self.bracket(y, z).items():
                    for k, v in self.bracket(x, l).items():
                        _acc(tot, k, u * v)
            bad += bool(tot)
        return bad

    def invariance_defect(self) -> int:
        n = self.dim
        bad = 0
        for a, b, c in itertools.product(range(n), repeat=3):
            lhs = sum((u * self.form[l][c] for l, u in self.bracket(a, b).items()), Fraction(0))
            rhs = sum((u * self.form[a][l] for l, u in self.bracket(b, c).items()), Fraction(0))
            bad += lhs != rhs
        return bad

    def is_nondegenerate(self) -> bool:
        return scalars.rank(self.form, self.dim) == self.dim

    def form_inverse(self) -> List[List[Fraction]]:
        return [[Fraction(x) for x in row] for row in scalars.inverse(self.form)]


def _matmul(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def _trace(a) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def matrix_lie_algebra(name: str, labels: List[str], mats: List[List[List[Fraction]]]) -> QuadLieAlgebra:
    """Lie algebra spanned by matrices with the trace form Q(A, B) = Tr(AB)."""
    n = len(mats)
    form = [[_trace(_matmul(a, b)) for b in mats] for a in mats]
    inv = scalars.inverse(form)
    struct = {}
    for i, j in itertools.product(range(n), repeat=2):
        ab, ba = _matmul(mats[i], mats[j]), _matmul(mats[j], mats[i])
        c = [[ab[r][s] - ba[r][s] for s in range(len(ab))] for r in range(len(ab))]
        pair = [_trace(_matmul(c, m)) for m in mats]
        coeff = {k: Fraction(sum((inv[k][l] * pair[l] for l in range(n)), Fraction(0))) for k in range(n)}
        coeff = {k: v for k, v in coeff.items() if v}
        if coeff:
            struct[(i, j)] = coeff
    return QuadLieAlgebra(name, labels, struct, form, mats)


def sl2() -> QuadLieAlgebra:
    F = Fraction
    e = [[F(0), F(1)], [F(0), F(0)]]
    h = [[F(1), F(0)], [F(0), F(-1)]]
    f = [[F(0), F(0)], [F(1), F(0)]]
    return matrix_lie_algebra("sl2", ["e", "h", "f"], [e, h, f])


def mat_n(N: int) -> QuadLieAlgebra:
    mats, labels = [], []
    for i in range(N):
        for j in range(N):
            m = [[Fraction(0)] * N for _ in range(N)]
            m[i][j] = Fraction(1)
            mats.append(m)
            labels.append(f"E{i + 1}{j + 1}")
    return matrix_lie_algebra(f"mat{N}", labels, mats)


def abelian_lie(dim: int) -> QuadLieAlgebra:
    form = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    return QuadLieAlgebra(f"ab{dim}", [f"t{i}" for i in range(dim)], {}, form, None)


def get_lie(name: str) -> QuadLieAlgebra:
    if name == "sl2":
        return sl2()
    if name.startswith("mat"):
        return mat_n(int(name[3:]))
    if name.startswith("ab"):
        return abelian_lie(int(name[2:]))
    raise KeyError(name)


# ------------------------------------------------------- DG Lie algebras

@dataclass
class DGLie:
    """Finite graded Lie algebra with differential; bracket[(I, J)] = {K: c}."""
    degrees: List[int]
    bracket: Dict[Tuple[int, int], Dict[int, object]]
    differential: Dict[int, Dict[int, object]] = field(default_factory=dict)
    labels: List[str] = field(default_factory=list)
    weights: List[int] = field(default_factory=list)
    bidegrees: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def coordinates(self) -> Coordinates:
        return Coordinates(tuple(1 - d for d in self.degrees), tuple(self.labels),
                           tuple(self.bidegrees), tuple(-w for w in self.weights))


def current_algebra(A: PDAlgebra, g: QuadLieAlgebra, reduced: bool = False) -> Tuple[DGLie, List[Tuple[int, int]]]:
    """A (x) g with [a s, b t] = ab [s, t]; reduced keeps 0 < deg < 2n and drops top products."""
    classes = A.reduced_indices() if reduced else list(range(A.dim))
    pairs = [(a, i) for a in classes for i in range(g.dim)]
    idx = {p: k for k, p in enumerate(pairs)}
    br: Dict[Tuple[int, int], Dict[int, object]] = {}
    for (a, i), (b, j) in itertools.product(pairs, repeat=2):
        out: Dict[int, object] = {}
        prod = A.mul_basis(a, b)
        for c, u in prod.items():
            if (c, 0) not in idx:
                continue
            for k, v in g.bracket(i, j).items():
                _acc(out, idx[(c, k)], u * v)
        if out:
            br[(idx[(a, i)], idx[(b, j)])] = out
    L = DGLie([A.deg(a) for a, _ in pairs], br, {},
              [f"{A.basis[a].label}.{g.labels[i]}" for a, i in pairs], [A.deg(a) for a, _ in pairs],
              [(A.basis[a].p, A.basis[a].q) for a, _ in pairs])
    return L, pairs


def chern_simons_vector_field(L: DGLie) -> PolyVectorField:
    """Q(alpha) = (1 (x) d) alpha + 1/2 [alpha, alpha] for the universal point alpha."""
    X = L.coordinates()
    comps: Dict[int, Poly] = {}
    for I, img in L.differential.items():
        s = -1 if X.odd(I) else 1
        for K, c in img.items():
            _acc(comps.setdefault(K, {}), (I,), s * c)
    half = Fraction(1, 2)
    for (I, J), img in L.bracket.items():
        # [x_I e_I, x_J e_J] = (-1)^{|e_I||x_J|} x_I x_J [e_I, e_J]
        s = -1 if (L.degrees[I] * X.degrees[J]) & 1 else 1
        sm, m = mono_mul(X, (I,), (J,))
        if not sm:
            continue
        for K, c in img.items():
            _acc(comps.setdefault(K, {}), m, half * s * sm * c)
    return PolyVectorField(X, {k: v for k, v in comps.items() if v}, 1)


def chern_simons_field(g: QuadLieAlgebra, A: PDAlgebra, reduced: bool = False) -> PolyVectorField:
    L, _ = current_algebra(A, g, reduced)
    return chern_simons_vector_field(L)


# --------------------------------------------------- symplectic structure

def symplectic_matrix(A: PDAlgebra, g: QuadLieAlgebra, reduced: bool = False) -> List[List[Fraction]]:
    """omega(h1 g1, h2 g2) = (-1)^{|h1|} Q(g1, g2) int h1 h2 on the basis of A (x) g."""
    L, pairs = current_algebra(A, g, reduced)
    M = []
    for (a, i) in pairs:
        row = []
        for (b, j) in pairs:
            tr = A.trace(A.mul_basis(a, b))
            row.append(Fraction((-1) ** A.deg(a)) * g.form[i][j] * tr)
        M.append(row)
    return M


def symplectic_checks(A: PDAlgebra, g: QuadLieAlgebra, reduced: bool = False) -> Dict[str, bool]:
    L, pairs = current_algebra(A, g, reduced)
    M = symplectic_matrix(A, g, reduced)
    n = len(pairs)
    shifted = [d - 1 for d in L.degrees]
    anti = all(M[I][J] == -(-1) ** (shifted[I] * shifted[J]) * M[J][I] for I in range(n) for J in range(n))
    even = all(M[I][J] == 0 or (shifted[I] + shifted[J]) % 2 == 0 for I in range(n) for J in range(n))
    return {"graded_antisymmetric": anti, "even": even, "nondegenerate": scalars.rank(M, n) == n}


def hamiltonian_field(X: Coordinates, omega: List[List[Fraction]], H: Poly, degree: int) -> PolyVectorField:
    """V(x_K) = (-1)^{|x_K|(|V|+1)} sum_L P^{KL} d_L H with P the inverse of omega."""
    P = scalars.inverse(omega)
    comps: Dict[int, Poly] = {}
    derivs = {L: derivative(X, H, L) for L in range(len(X))}
    for K in range(len(X)):
        sK = -1 if (X.degrees[K] * (degree + 1)) & 1 else 1
        acc: Poly = {}
        for L, dH in derivs.items():
            if P[K][L] and dH:
                for m, c in dH.items():
                    _acc(acc, m, sK * P[K][L] * c)
        if acc:
            comps[K] = acc
    return PolyVectorField(X, comps, degree)


def universal_pairing(L: DGLie, A: PDAlgebra, g: QuadLieAlgebra, pairs, u: Dict[int, Poly],
                      v: Dict[int, Poly]) -> Poly:
    """Invariant pairing int Q(u v) of O-valued elements u = sum f_I e_I, v = sum g_J e_J."""
    X = L.coordinates()
    out: Poly = {}
    for I, f in u.items():
        a, i = pairs[I]
        for J, h in v.items():
            b, j = pairs[J]
            val = g.form[i][j] * A.trace(A.mul_basis(a, b))
            if not val:
                continue
            for m, c in h.items():
                # e_I passes the coefficient of v
                s = -1 if (A.deg(a) * X.mono_degree(m)) & 1 else 1
                for mf, cf in f.items():
                    ss, mm = mono_mul(X, mf, m)
                    if ss:
                        _acc(out, mm, s * ss * val * cf * c)
    return out


def universal_bracket(L: DGLie, u: Dict[int, Poly], v: Dict[int, Poly]) -> Dict[int, Poly]:
    X = L.coordinates()
    out: Dict[int, Poly] = {}
    for I, f in u.items():
        for J, h in v.items():
            img = L.bracket.get((I, J))
            if not img:
                continue
            for m, c in h.items():
                s = -1 if (L.degrees[I] * X.mono_degree(m)) & 1 else 1
                prod = poly_mul(X, f, {m: c})
                for K, k in img.items():
                    tgt = out.setdefault(K, {})
                    for mm, cc in prod.items():
                        _acc(tgt, mm, s * k * cc)
    return {K: p for K, p in out.items() if p}


def chern_simons_function(A: PDAlgebra, g: QuadLieAlgebra, reduced: bool = False) -> Poly:
    """CS(alpha) = 1/6 (alpha, [alpha, alpha]) (the differential vanishes on our models)."""
    L, pairs = current_algebra(A, g, reduced)
    alpha = {I: var(I) for I in range(L.dim)}
    return poly_scale(universal_pairing(L, A, g, pairs, alpha, universal_bracket(L, alpha, alpha)),
                      Fraction(1, 6))


def cs_hamiltonian_field(A: PDAlgebra, g: QuadLieAlgebra, reduced: bool = False) -> PolyVectorField:
    L, _ = current_algebra(A, g, reduced)
    return hamiltonian_field(L.coordinates(), symplectic_matrix(A, g, reduced),
                             chern_simons_function(A, g, reduced), 1)


# ------------------------------------------- transport of Lie derivations

class UniversalPoint:
    """phi(h_a) = sum_i x_{a,i} t_i for the reduced homology letters of A, evaluated in a matrix realisation."""

    def __init__(self, A: PDAlgebra, g: QuadLieAlgebra):
        if g.rep is None:
            raise ValueError("transport needs a matrix realisation of the Lie algebra")
        self.A, self.g = A, g
        self.L, self.pairs = current_algebra(A, g, reduced=True)
        self.X = self.L.coordinates()
        self.index = {p: k for k, p in enumerate(self.pairs)}
        self.N = len(g.rep[0])
        self.finv = g.form_inverse()
        self._letter: Dict[int, List[List[Poly]]] = {}

    def letter_matrix(self, a: int) -> List[List[Poly]]:
        if a not in self._letter:
            M = [[{} for _ in range(self.N)] for _ in range(self.N)]
            for i, t in enumerate(self.g.rep):
                v = self.index[(a, i)]
                for r in range(self.N):
                    for s in range(self.N):
                        if t[r][s]:
                            _acc(M[r][s], (v,), t[r][s])
            self._letter[a] = M
        return self._letter[a]

    def matmul(self, P, R):
        N = self.N
        return [[poly_add(*(poly_mul(self.X, P[r][k], R[k][s]) for k in range(N))) for s in range(N)]
                for r in range(N)]

    def word_matrix(self, w: Sequence[int], cache: Dict[tuple, list]) -> List[List[Poly]]:
        w = tuple(w)
        if w in cache:
            return cache[w]
        if len(w) == 1:
            M = self.letter_matrix(w[0])
        else:
            M = self.matmul(self.word_matrix(w[:-1], cache), self.letter_matrix(w[-1]))
        cache[w] = M
        return M

    def tensor_matrix(self, x: Dict[tuple, object], cache: Optional[dict] = None) -> List[List[Poly]]:
        cache = {} if cache is None else cache
        N = self.N
        out = [[{} for _ in range(N)] for _ in range(N)]
        for w, c in x.items():
            M = self.word_matrix(w, cache)
            for r in range(N):
                for s in range(N):
                    for m, d in M[r][s].items():
                        _acc(out[r][s], m, c * d)
        return out

    def lie_coefficients(self, M) -> Dict[int, Poly]:
        """Coefficients of t_k of a matrix in the span of the realisation (trace-form projection)."""
        g, N = self.g, self.N
        pair = []
        for t in g.rep:
            acc: Poly = {}
            for r in range(N):
                for s in range(N):
                    if t[s][r]:
                        for m, c in M[r][s].items():
                            _acc(acc, m, t[s][r] * c)
            pair.append(acc)
        out = {}
        for k in range(g.dim):
            p = poly_add(*(poly_scale(pair[l], self.finv[k][l]) for l in range(g.dim) if self.finv[k][l]))
            if p:
                out[k] = p
        return out

    def trace(self, M) -> Poly:
        return poly_add(*(M[r][r] for r in range(self.N)))


def transport_derivation(A: PDAlgebra, g: QuadLieAlgebra, D: Derivation,
                         point: Optional[UniversalPoint] = None) -> PolyVectorField:
    """Vector field V_D with V_D(x_{a,i}) = t_i-coefficient of phi(D h_a)."""
    U = point or UniversalPoint(A, g)
    cache: dict = {}
    comps: Dict[int, Poly] = {}
    for a in A.reduced_indices():
        img = D.image(a)
        if not img:
            continue
        for i, p in U.lie_coefficients(U.tensor_matrix(img, cache)).items():
            comps[U.index[(a, i)]] = p
    return PolyVectorField(U.X, comps, D.degree)


def _trace_function(U: UniversalPoint, F: CyclicChain) -> Poly:
    cache: dict = {}
    out: Poly = {}
    for w, c in F.terms.items():
        for m, d in U.trace(U.word_matrix(w, cache)).items():
            _acc(out, m, c * d)
    return out


def hamiltonian_of_chain(A: PDAlgebra, g: QuadLieAlgebra, F: CyclicChain) -> Poly:
    """Contraction function alpha -> sum_W c_W Tr(phi(w_0) ... phi(w_m))."""
    return _trace_function(UniversalPoint(A, g), F)


def field_of_chain(A: PDAlgebra, g: QuadLieAlgebra, F: CyclicChain) -> PolyVectorField:
    """Hamiltonian vector field of the contraction function of F."""
    U = UniversalPoint(A, g)
    H = _trace_function(U, F)
    degs = {F.alphabet.word_deg(w) for w in F.terms}
    deg = (degs.pop() if len(degs) == 1 else 0) + 2 * A.n - 2
    omega = symplectic_matrix(A, g, reduced=True)
    return hamiltonian_field(U.X, omega, H, deg)


def theta_transport(A: PDAlgebra, g: QuadLieAlgebra, F: CyclicChain) -> PolyVectorField:
    return transport_derivation(A, g, theta(A, F))


def hodge_field(table, g: QuadLieAlgebra, A: PDAlgebra, poly_degree: Optional[int] = None) -> PolyVectorField:
    """Hodge vector field of a correlator table, through the given polynomial degree.

    ``table`` is a CorrelatorTable, or a homology CyclicChain taken as the class itself.
    """
    if isinstance(table, CyclicChain):
        G = table
        if poly_degree is not None:
            G = CyclicChain(G.alphabet, {w: c for w, c in G.terms.items() if len(w) - 1 <= poly_degree}, True)
        return field_of_chain(A, g, G)
    from .correlator_engine import assemble_class, cohomology_words, may_contribute
    cap = poly_degree if poly_degree is not None else max((len(w) for w in table.entries), default=3) - 1
    missing = [w for L in range(3, cap + 2) for w in cohomology_words(A, L)
               if may_contribute(w, A) and w not in table.entries]
    if missing:
        raise MissingEntries(f"{len(missing)} words missing, first {missing[0]}")
    entries = {w: e for w, e in table.entries.items() if len(w) - 1 <= cap}
    G, _ = assemble_class(A, entries)
    return field_of_chain(A, g, G)


def deformation_square(Q_cs: PolyVectorField, Q: PolyVectorField) -> PolyVectorField:
    """(Q_CS + eps Q)^2 for an odd parameter eps of degree 1 adjoined as a coordinate."""
    X = Q_cs.coords
    eps = len(X)
    Xe = Coordinates(X.degrees + (1,), X.labels + ("eps",) if X.labels else (),
                     X.bidegrees + ((0, 0),) if X.bidegrees else (), X.weights + (0,) if X.weights else ())
    q1 = PolyVectorField(Xe, dict(Q_cs.comps), Q_cs.degree)
    q2 = PolyVectorField(Xe, {k: poly_mul(Xe, var(eps), p) for k, p in Q.comps.items()}, Q.degree + 1)
    return square(q1 + q2)


# --------------------------------------------------- Chevalley cohomology

def _monomials(X: Coordinates, cap: int, min_deg: int) -> List[Mono]:
    out = []
    for d in range(min_deg, cap + 1):
        for m in itertools.combinations_with_replacement(range(len(X)), d):
            if any(X.odd(m[i]) and m[i] == m[i + 1] for i in range(len(m) - 1)):
                continue
            out.append(m)
    return out


@dataclass
class CohomologyReport:
    dims: Dict[Tuple[int, int], int]
    cochains: Dict[Tuple[int, int], int]
    representatives: Dict[Tuple[int, int], List[Dict[Tuple[Mono, int], object]]]

    def nonzero(self) -> Dict[Tuple[int, int], int]:
        return {k: v for k, v in self.dims.items() if v}


def chevalley_cohomology(L: DGLie, reduced: bool = True, degree_cap: int = 3,
                         weights: Optional[Sequence[int]] = None,
                         degrees: Optional[Sequence[int]] = None,
                         representatives: bool = False) -> CohomologyReport:
    """Cohomology of S^{(>0)}(L[1]^vee) (x) L modulo polynomial degree > cap, differential [Q_CS, -].

    Graded by (cochain degree, weight) with cochain degree = field degree + 1.
    """
    X = L.coordinates()
    Q = chern_simons_vector_field(L)
    monos = _monomials(X, degree_cap, 1 if reduced else 0)
    wt = L.weights or [0] * L.dim
    cells: Dict[Tuple[int, int], List[Tuple[Mono, int]]] = {}
    for m in monos:
        for K in range(L.dim):
            deg = X.mono_degree(m) - X.degrees[K] + 1
            w = wt[K] - sum(wt[v] for v in m)
            cells.setdefault((deg, w), []).append((m, K))
    ranks: Dict[Tuple[int, int], int] = {}
    images: Dict[Tuple[int, int], list] = {}

    def image(cell):
        rows = []
        for m, K in cells[cell]:
            V = PolyVectorField(X, {K: {m: Fraction(1)}}, cell[0] - 1)
            DV = commutator(Q, V).truncated(degree_cap)
            rows.append({(mm, k): c for k, p in DV.comps.items() for mm, c in p.items()})
        return rows

    want_w = set(weights) if weights is not None else None
    want_d = set(degrees) if degrees is not None else None
    dims, sizes, reps = {}, {}, {}
    for (deg, w) in sorted(cells):
        if want_w is not None and w not in want_w:
            continue
        if want_d is not None and deg not in want_d:
            continue
        for cell in ((deg, w), (deg - 1, w)):
            if cell in cells and cell not in ranks:
                rows = image(cell)
                images[cell] = rows
                ranks[cell] = scalars.sparse_rank([r for r in rows if r])
        n = len(cells[(deg, w)])
        r_out = ranks[(deg, w)]
        r_in = ranks.get((deg - 1, w), 0)
        dims[(deg, w)] = n - r_out - r_in
        sizes[(deg, w)] = n
        if representatives and dims[(deg, w)]:
            reps[(deg, w)] = _representatives(cells, images, (deg, w))
    return CohomologyReport(dims, sizes, reps)


def _representatives(cells, images, cell):
    """Cocycles completing a basis of the image of the incoming differential."""
    basis = cells[cell]
    rows = images[cell]
    keys = sorted({k for r in rows for k in r}, key=repr)
    M = [[r.get(k, 0) for k in keys] for r in rows]
    # kernel of the outgoing map: vectors z with z . M = 0
    Mt = [[M[i][j] for i in range(len(rows))] for j in range(len(keys))] if keys else []
    ker = scalars.nullspace(Mt, len(rows)) if keys else [[Fraction(int(i == j)) for i in range(len(rows))]
                                                            for j in range(len(rows))]
    incoming = images.get((cell[0] - 1, cell[1]), [])
    chosen: list = [[r.get(b, 0) for b in basis] for r in incoming if r]
    base_rank = scalars.rank(chosen, len(basis)) if chosen else 0
    reps = []
    for z in ker:
        trial = chosen + [z]
        r = scalars.rank(trial, len(basis))
        if r > base_rank:
            chosen, base_rank = trial, r
            reps.append({basis[i]: c for i, c in enumerate(z) if c})
    return reps


def free_lie_dg(num_gens: int, max_weight: int) -> DGLie:
    """Free Lie algebra on even generators truncated above max_weight."""
    from .cyclic_words import Alphabet
    from .free_lie import lie_basis, t_bracket
    alpha = Alphabet(tuple(range(num_gens)), tuple((a, 0) for a in range(num_gens)), "homology")
    bases = {L: lie_basis(alpha, L) for L in range(1, max_weight + 1)}
    elems, labels, weights = [], [], []
    for L, B in bases.items():
        for lbl, e in zip(B.labels, B.elements):
            elems.append((L, e))
            labels.append("".join(map(str, lbl)))
            weights.append(L)
    offset, k = {}, 0
    for L, B in bases.items():
        offset[L] = k
        k += len(B)
    br: Dict[Tuple[int, int], Dict[int, object]] = {}
    for I, (Li, ei) in enumerate(elems):
        for J, (Lj, ej) in enumerate(elems):
            if Li + Lj > max_weight:
                continue
            x = t_bracket(alpha, ei, ej)
            if not x:
                continue
            co = bases[Li + Lj].coordinates(x)
            out = {offset[Li + Lj] + t: c for t, c in enumerate(co) if c}
            if out:
                br[(I, J)] = out
    return DGLie([0] * len(elems), br, {}, labels, weights)


def abelian_dg(degrees: Sequence[int]) -> DGLie:
    return DGLie(list(degrees), {}, {}, [f"u{i}" for i in range(len(degrees))], [1] * len(degrees))


def contractible_extension(L: DGLie, degree: int = 0) -> DGLie:
    """L (+) <u, v> with d u = v, |v| = |u| + 1, both central."""
    n = L.dim
    diff = {k: dict(v) for k, v in L.differential.items()}
    diff[n] = {n + 1: Fraction(1)}
    wts = list(L.weights or [0] * n)
    w = max(wts) + 1 if wts else 1
    return DGLie(list(L.degrees) + [degree, degree + 1], dict(L.bracket), diff,
                 list(L.labels or [str(i) for i in range(n)]) + ["u", "v"], wts + [w, w])


def symmetric_power_dims(degrees: Sequence[int], cap: int) -> Dict[int, int]:
    """Number of monomials of each polynomial degree in coordinates of degree 1 - |e|."""
    X = Coordinates(tuple(1 - d for d in degrees))
    out: Dict[int, int] = {}
    for m in _monomials(X, cap, 0):
        out[len(m)] = out.get(len(m), 0) + 1
    return out


# ---------------------------------------------------------------- action

def _lie_wedge3(g: QuadLieAlgebra, a: Sequence[FourierForm], b: Sequence[FourierForm],
                c: Sequence[FourierForm]) -> FourierForm:
    total = None
    for i, j, k in itertools.product(range(g.dim), repeat=3):
        t = g.triple(i, j, k)
        if not t:
            continue
        term = a[i].wedge(b[j]).wedge(c[k]).scale(float(t))
        total = term if total is None else total + term
    return total if total is not None else FourierForm.zero(a[0].torus)


def _integrate_top(f: FourierForm) -> complex:
    part = f.homogeneous().get(f.torus.real_dim)
    return part.integrate() if part is not None else 0j


def _pair_forms(g: QuadLieAlgebra, a: Sequence[FourierForm], b: Sequence[FourierForm]) -> complex:
    """int (a, b) = sum over homogeneous parts (-1)^{deg a} Q(a ^ b)."""
    tot = 0j
    for i in range(g.dim):
        for j in range(g.dim):
            q = g.form[i][j]
            if not q:
                continue
            for d, ai in a[i].homogeneous().items():
                tot += float(q) * (-1) ** d * _integrate_top(ai.wedge(b[j]))
    return tot


def action_functional(psi0: Sequence[FourierForm], alpha: Sequence[FourierForm], phi: Sequence[FourierForm],
                      g: QuadLieAlgebra, tol: float = 1e-9) -> complex:
    """S(psi) = int 1/2 (phi, d psi) + 1/6 <phi, psi, psi> with psi = psi0 + alpha, d^C phi = psi0."""
    for p0, ph in zip(psi0, phi):
        if (ph.dC() - p0).norm() > tol * max(1.0, p0.norm()):
            raise SplittingViolation("d^C phi differs from psi0")
    psi = [p0 + a for p0, a in zip(psi0, alpha)]
    dpsi = [p.d() for p in psi]
    quad = 0.5 * _pair_forms(g, phi, dpsi)
    cubic_form = _lie_wedge3(g, phi, psi, psi)
    return quad + _integrate_top(cubic_form) / 6.0


def synthetic_closed_chain(A: PDAlgebra, seed: int = 3, lengths: Sequence[int] = (2, 3),
                           per_length: int = 4) -> CyclicChain:
    """F = delta B for a random B of derivation degree -1, so delta F = 0 exactly."""
    import random
    from .cyclic_words import homology_alphabet
    from .free_lie import clie_slice, delta_op
    ah = homology_alphabet(A)
    rng = random.Random(seed)
    B = CyclicChain(ah, {}, True)
    for L in lengths:
        S = clie_slice(A, ah, L, -1)
        for c in rng.sample(S, min(per_length, len(S))):
            B = B + c.scale(Fraction(rng.randint(1, 3)))
    return delta_op(A, B)
