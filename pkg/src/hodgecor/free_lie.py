"""Free graded Lie algebras, derivations, theta, the necklace bracket and Delta.

Tensor-algebra elements are dicts {word: coeff}.  Lie elements are stored in
their tensor embedding; ``LieElement`` adds degree bookkeeping and Lyndon
coordinates.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import scalars
from .cyclic_words import (Alphabet, CyclicChain, TensorChain, Word, canonical_words,
                           homology_alphabet, ncpd_all, project_tensor, separation_sign)
from .pd_algebra import PDAlgebra
from .scalars import Scalar

Tensor = Dict[Word, Scalar]


def _acc(d: dict, k, c) -> None:
    v = d.get(k, 0) + c
    if v == 0:
        d.pop(k, None)
    else:
        d[k] = v


# ------------------------------------------------------------ tensor algebra

def t_add(*xs: Tensor) -> Tensor:
    out: Tensor = {}
    for x in xs:
        for w, c in x.items():
            _acc(out, w, c)
    return out


def t_scale(x: Tensor, s) -> Tensor:
    if s == 0:
        return {}
    return {w: s * c for w, c in x.items()}


def t_mul(a: Tensor, b: Tensor) -> Tensor:
    out: Tensor = {}
    for u, c in a.items():
        for v, d in b.items():
            _acc(out, u + v, c * d)
    return out


def t_bracket(alpha: Alphabet, a: Tensor, b: Tensor) -> Tensor:
    """Graded commutator [a, b] = ab - (-1)^{|a||b|} ba, termwise."""
    out: Tensor = {}
    for u, c in a.items():
        pu = alpha.parity(u)
        for v, d in b.items():
            _acc(out, u + v, c * d)
            s = -1 if (pu and alpha.parity(v)) else 1
            _acc(out, v + u, -s * c * d)
    return out


def letter(a: int) -> Tensor:
    return {(a,): Fraction(1)}


def left_normed(alpha: Alphabet, w: Sequence[int]) -> Tensor:
    """[[..[w1, w2], w3]..., wk]."""
    x = letter(w[0])
    for a in w[1:]:
        x = t_bracket(alpha, x, letter(a))
    return x


def right_normed(alpha: Alphabet, w: Sequence[int]) -> Tensor:
    """[w1, [w2, [..., wk]]]."""
    x = letter(w[-1])
    for a in reversed(w[:-1]):
        x = t_bracket(alpha, letter(a), x)
    return x


def dynkin(alpha: Alphabet, x: Tensor) -> Tensor:
    """Dynkin map: equals x when x is a Lie element of pure length."""
    out: Tensor = {}
    for w, c in x.items():
        if not w:
            continue
        for v, d in right_normed(alpha, w).items():
            _acc(out, v, c * d / len(w))
    return out


def coproduct_defect(alpha: Alphabet, x: Tensor) -> Dict[Tuple[Word, Word], Scalar]:
    """Reduced coshuffle coproduct nu(x) - x(x)1 - 1(x)x; zero iff x is primitive."""
    out: Dict[Tuple[Word, Word], Scalar] = {}
    for w, c in x.items():
        m = len(w)
        for r in range(1, m):
            for S in itertools.combinations(range(m), r):
                Sset = set(S)
                left = tuple(w[i] for i in S)
                right = tuple(w[i] for i in range(m) if i not in Sset)
                # Koszul sign of moving the letters of S to the front
                sign = 1
                odd_right_seen = 0
                for i in range(m):
                    if i in Sset:
                        if alpha.deg(w[i]) & 1 and odd_right_seen & 1:
                            sign = -sign
                    elif alpha.deg(w[i]) & 1:
                        odd_right_seen += 1
                _acc(out, (left, right), sign * c)
    return out


def is_lie(alpha: Alphabet, x: Tensor) -> bool:
    """Coshuffle-primitive criterion for membership in the free Lie algebra."""
    return not coproduct_defect(alpha, x)


# ------------------------------------------------------------ Lyndon basis

def is_lyndon(w: Sequence[int]) -> bool:
    w = tuple(w)
    return all(w < w[i:] + w[:i] for i in range(1, len(w))) if len(w) > 1 else len(w) == 1


def lyndon_words(letters: Sequence[int], length: int) -> List[Word]:
    """Duval's algorithm restricted to one length."""
    letters = sorted(letters)
    k = len(letters)
    out = []
    if k == 0:
        return out
    w = [-1]
    while w:
        w[-1] += 1
        if len(w) == length:
            out.append(tuple(letters[i] for i in w))
        m = len(w)
        while len(w) < length:
            w.append(w[len(w) - m])
        while w and w[-1] == k - 1:
            w.pop()
    return out


def standard_factorization(w: Word) -> Tuple[Word, Word]:
    """w = uv with v the longest proper Lyndon suffix."""
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ValueError("word of length 1 has no factorization")


def lyndon_bracket(alpha: Alphabet, w: Word, _cache: Optional[dict] = None) -> Tensor:
    if _cache is None:
        _cache = {}
    if w in _cache:
        return _cache[w]
    if len(w) == 1:
        res = letter(w[0])
    else:
        u, v = standard_factorization(w)
        res = t_bracket(alpha, lyndon_bracket(alpha, u, _cache), lyndon_bracket(alpha, v, _cache))
    _cache[w] = res
    return res


@dataclass
class LieBasis:
    """Basis of one slice of the free Lie (super)algebra.

    Elements are super-Lyndon brackets: b(w) for Lyndon words w, plus [b(u), b(u)]
    for odd Lyndon u (labelled by the word uu).
    """

    alpha: Alphabet
    labels: List[Word]
    elements: List[Tensor]

    def __len__(self):
        return len(self.elements)

    def coordinates(self, x: Tensor) -> Optional[List[Scalar]]:
        words = sorted({w for e in self.elements for w in e} | set(x))
        index = {w: i for i, w in enumerate(words)}
        rows = scalars.dense_rows(self.elements, index)
        target = [Fraction(0)] * len(words)
        for w, c in x.items():
            target[index[w]] = c
        return scalars.solve_left(rows, target)


_BASIS_CACHE: Dict[tuple, LieBasis] = {}


def lie_basis(alpha: Alphabet, length: int, degree: Optional[int] = None,
              weight: Optional[Callable[[Word], int]] = None, weight_value: Optional[int] = None) -> LieBasis:
    key = (alpha, length, degree, weight_value if weight is not None else None,
           getattr(weight, "__name__", None))
    if weight is None and key in _BASIS_CACHE:
        return _BASIS_CACHE[key]
    cache: dict = {}
    labels, elems = [], []
    for w in lyndon_words(alpha.letters, length):
        if degree is not None and alpha.word_deg(w) != degree:
            continue
        if weight is not None and weight(w) != weight_value:
            continue
        labels.append(w)
        elems.append(lyndon_bracket(alpha, w, cache))
    if length % 2 == 0:
        for u in lyndon_words(alpha.letters, length // 2):
            if not alpha.parity(u):
                continue
            ww = u + u
            if degree is not None and alpha.word_deg(ww) != degree:
                continue
            if weight is not None and weight(ww) != weight_value:
                continue
            bu = lyndon_bracket(alpha, u, cache)
            labels.append(ww)
            elems.append(t_bracket(alpha, bu, bu))
    basis = LieBasis(alpha, labels, elems)
    if weight is None:
        _BASIS_CACHE[key] = basis
    return basis


def lie_basis_by_weight(alpha: Alphabet, weight: Callable[[int], int], weight_value: int,
                        degree: Optional[int] = None, max_length: int = 12) -> LieBasis:
    """Lie slice of fixed total letter weight (letters may have different weights)."""
    labels, elems = [], []
    minw = min(weight(a) for a in alpha.letters)
    maxlen = min(max_length, weight_value // max(minw, 1))
    for L in range(1, maxlen + 1):
        b = lie_basis(alpha, L, degree, weight=lambda w: sum(weight(a) for a in w), weight_value=weight_value)
        labels += b.labels
        elems += b.elements
    return LieBasis(alpha, labels, elems)


def super_witt_dims(n_even: int, n_odd: int, max_len: int) -> List[int]:
    """dim Lie_w of the free Lie superalgebra on n_even even and n_odd odd generators.

    From PBW: prod_{w,j} (1 + t^w s^j)^{L_{w,j}} (j odd) / (1 - t^w s^j)^{L_{w,j}} (j even)
    equals 1 / (1 - n_even t - n_odd t s).  Solved degree by degree with exact series.
    """
    # target coefficients T[w][j] = C(w, j) n_even^{w-j} n_odd^j
    from math import comb
    T = [[comb(w, j) * n_even ** (w - j) * n_odd ** j for j in range(w + 1)] for w in range(max_len + 1)]
    L: Dict[Tuple[int, int], int] = {}

    def product_series(maxw):
        P = [[Fraction(0)] * (maxw + 1) for _ in range(maxw + 1)]
        P[0][0] = Fraction(1)
        for (w, j), dim in L.items():
            if dim == 0:
                continue
            # factor series in (t^w s^j)^k
            coeffs = []
            for k in range(maxw // w + 1):
                if j % 2:  # (1 + x)^dim
                    coeffs.append(Fraction(comb(dim, k)))
                else:  # (1 - x)^{-dim}
                    coeffs.append(Fraction(comb(dim + k - 1, k)))
            Q = [[Fraction(0)] * (maxw + 1) for _ in range(maxw + 1)]
            for a in range(maxw + 1):
                for b in range(a + 1):
                    if P[a][b] == 0:
                        continue
                    for k, ck in enumerate(coeffs):
                        aa, bb = a + k * w, b + k * j
                        if aa > maxw or ck == 0:
                            break
                        Q[aa][bb] += P[a][b] * ck
            P = Q
        return P

    for w in range(1, max_len + 1):
        P = product_series(w)
        for j in range(w + 1):
            L[(w, j)] = int(T[w][j] - P[w][j])
    return [sum(L.get((w, j), 0) for j in range(w + 1)) for w in range(1, max_len + 1)]


# --------------------------------------------------------------- LieElement

@dataclass
class LieElement:
    alpha: Alphabet
    terms: Tensor
    degree: int = 0

    def check(self) -> bool:
        return is_lie(self.alpha, self.terms)

    def lyndon_coordinates(self) -> Dict[Word, Scalar]:
        by_len: Dict[int, Tensor] = {}
        for w, c in self.terms.items():
            by_len.setdefault(len(w), {})[w] = c
        out: Dict[Word, Scalar] = {}
        for L, part in by_len.items():
            b = lie_basis(self.alpha, L)
            coords = b.coordinates(part)
            if coords is None:
                raise ValueError("element is not in the free Lie algebra")
            for lab, c in zip(b.labels, coords):
                if c != 0:
                    out[lab] = c
        return out


# ---------------------------------------------------------------- derivations

@dataclass
class Derivation:
    alpha: Alphabet
    images: Dict[int, Tensor] = field(default_factory=dict)
    degree: int = 0

    def image(self, a: int) -> Tensor:
        return self.images.get(a, {})

    def apply(self, x: Tensor) -> Tensor:
        alpha = self.alpha
        odd = self.degree & 1
        out: Tensor = {}
        for w, c in x.items():
            par = 0
            for i, a in enumerate(w):
                img = self.images.get(a)
                if img:
                    s = -1 if (odd and par) else 1
                    pre, post = w[:i], w[i + 1:]
                    for v, d in img.items():
                        _acc(out, pre + v + post, s * c * d)
                par ^= alpha.deg(a) & 1
        return out

    def __add__(self, other: "Derivation") -> "Derivation":
        imgs = {a: t_add(self.image(a), other.image(a)) for a in set(self.images) | set(other.images)}
        return Derivation(self.alpha, {a: v for a, v in imgs.items() if v}, self.degree)

    def scale(self, s) -> "Derivation":
        return Derivation(self.alpha, {a: t_scale(v, s) for a, v in self.images.items() if s != 0}, self.degree)

    def is_zero(self) -> bool:
        return all(not v for v in self.images.values())

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return False
        keys = set(self.images) | set(other.images)
        return all(self.image(a) == other.image(a) for a in keys)


def commutator(D1: Derivation, D2: Derivation) -> Derivation:
    s = -1 if (D1.degree & 1 and D2.degree & 1) else 1
    imgs = {}
    for a in D1.alpha.letters:
        v = t_add(D1.apply(D2.image(a)), t_scale(D2.apply(D1.image(a)), -s))
        if v:
            imgs[a] = v
    return Derivation(D1.alpha, imgs, D1.degree + D2.degree)


# ------------------------------------------------------------- theta, bracket

def _omega(A: PDAlgebra, p: int, q: int):
    if p >= A.dim or q >= A.dim:
        return 0
    if not (0 < A.deg(p) < 2 * A.n and 0 < A.deg(q) < 2 * A.n):
        return 0
    return A.omega(p, q)


def word_shift(A: PDAlgebra) -> int:
    """Degree of the fundamental-class factor H."""
    return 2 * A.n - 2


def theta(A: PDAlgebra, F: CyclicChain) -> Derivation:
    """theta_F: q -> sum_p d_p F <p cap H cap q>."""
    alpha = F.alphabet
    parts = ncpd_all(F, "right")
    imgs: Dict[int, Tensor] = {}
    for p, dF in parts.items():
        for q in alpha.letters:
            w = _omega(A, p, q)
            if w:
                imgs[q] = t_add(imgs.get(q, {}), t_scale(dF.terms, w))
    degs = {alpha.word_deg(w) for w in F.terms}
    deg = (degs.pop() if len(degs) == 1 else 0) + word_shift(A)
    return Derivation(alpha, {q: v for q, v in imgs.items() if v}, deg)


def bracket(A: PDAlgebra, F: CyclicChain, G: CyclicChain) -> CyclicChain:
    """{F, G} = sum_{p,q} ( d_p F <p cap H cap q> d^-_q G )_C."""
    alpha = F.alphabet
    dF = ncpd_all(F, "right")
    dG = ncpd_all(G, "left")
    out = CyclicChain(alpha, {}, True)
    for p, fp in dF.items():
        for q, gq in dG.items():
            w = _omega(A, p, q)
            if not w:
                continue
            for u, c in fp.terms.items():
                for v, d in gq.terms.items():
                    out.add_word(u + v, w * c * d)
    return out


def cubic_coefficient(A: PDAlgebra, i: int, j: int, k: int) -> Scalar:
    return (-1) ** A.deg(j) * A.trace(A.mul(A.mul_basis(i, j), {k: Fraction(1)}))


def canonical_delta(A: PDAlgebra, alpha: Optional[Alphabet] = None, scale: Scalar = Fraction(1)) -> CyclicChain:
    """Delta = sum_W |Aut W|^{-1} eps(W) c(W) [W^vee] over cyclic triples of reduced classes."""
    alpha = alpha or homology_alphabet(A)
    red = A.reduced_indices()
    out = CyclicChain(alpha, {}, True)
    for w in itertools.product(red, repeat=3):
        c = cubic_coefficient(A, *w)
        if c == 0:
            continue
        # sum over all linear triples = 3/|Aut| times each class; eps makes the
        # dual pairing <Delta, [W]> equal to c(W)
        out.add_word(w, scale * Fraction(1, 3) * separation_sign(alpha, w) * c)
    return out


def delta_op(A: PDAlgebra, F: CyclicChain, Delta: Optional[CyclicChain] = None) -> CyclicChain:
    Delta = Delta if Delta is not None else canonical_delta(A, F.alphabet)
    return bracket(A, Delta, F)


def special_element(A: PDAlgebra, alpha: Optional[Alphabet] = None) -> Tensor:
    """S = sum_{p,q} (-1)^{|p||q|} Pi_{pq} x_p x_q with Pi the inverse of the symplectic matrix.

    This is the unique quadratic element (up to scale) killed by every theta_F.
    """
    alpha = alpha or homology_alphabet(A)
    red = A.reduced_indices()
    M = [[_omega(A, p, q) for q in red] for p in red]
    inv = scalars.inverse(M)
    out: Tensor = {}
    for a, p in enumerate(red):
        for b, q in enumerate(red):
            if inv[b][a] != 0:
                s = -1 if (alpha.deg(p) & 1 and alpha.deg(q) & 1) else 1
                _acc(out, (p, q), s * Fraction(inv[b][a]))
    return out


# ------------------------------------------------------------ graded slices

def hodge_weight_fn(A: PDAlgebra, t_letter: Optional[int] = None):
    def wt(a: int) -> int:
        if t_letter is not None and a == t_letter:
            return 2 * A.n
        return A.deg(a)
    return wt


def clie_slice(A: PDAlgebra, alpha: Alphabet, length: int, degree: Optional[int] = None) -> List[CyclicChain]:
    """Basis of CLie = image of Lie_{length-1} (x) letters in one (length, derivation degree) slice.

    Lie basis elements are degree-homogeneous, so the slice only needs the Lie
    elements whose degree complements the appended letter.
    """
    gens: List[CyclicChain] = []
    for h in alpha.letters:
        if degree is None:
            elems = lie_basis(alpha, length - 1).elements
        else:
            elems = lie_basis(alpha, length - 1, degree - word_shift(A) - alpha.deg(h)).elements
        for e in elems:
            cyc = project_tensor(alpha, TensorChain(t_mul(e, letter(h))))
            if not cyc.is_zero():
                gens.append(cyc)
    return reduce_to_basis(alpha, gens)


def reduce_to_basis(alpha: Alphabet, chains: List[CyclicChain]) -> List[CyclicChain]:
    return [CyclicChain(alpha, r, True) for r in scalars.sparse_rref([c.terms for c in chains])]


def chain_rank(chains: List[CyclicChain]) -> int:
    return scalars.sparse_rank([c.terms for c in chains])


def derivation_rank(ders: List[Derivation], letters: Sequence[int]) -> int:
    rows = [{(a, w): c for a in letters for w, c in D.image(a).items()} for D in ders]
    return scalars.sparse_rank(rows)


@dataclass
class DerSlice:
    """Basis of one graded slice of special derivations."""

    basis: List[Derivation]
    unknowns: int
    constraints: int


def _der_unknowns(A: PDAlgebra, alpha: Alphabet, wt, gens: Sequence[int], degree: int,
                  weight_shift: int):
    """Unknown slots: (generator q, Lie basis element) with the right degree and weight."""
    slots = []
    for q in gens:
        target_w = wt(q) + weight_shift
        target_d = alpha.deg(q) + degree
        if target_w <= 0:
            continue
        b = lie_basis_by_weight(alpha, wt, target_w, degree=target_d)
        for e in b.elements:
            slots.append((q, e))
    return slots


def special_derivations(A: PDAlgebra, variant: str = "H", degree: int = 0, weight: int = 3,
                        alpha: Optional[Alphabet] = None) -> DerSlice:
    """Basis of Der^S in the slice matching cyclic words of length ``weight``.

    The slice is fixed by the derivation degree and a Hodge-weight shift equal to
    the one produced by theta on length-``weight`` words of total class degree
    ``weight * ...``; for curves every letter has class degree 1 and the shift is
    weight - 2.  For variant "Htilde" an odd generator t (degree 1 - 2n, weight 2n)
    is added and D(t) = 0 is imposed together with D(S) = 0.
    """
    base_alpha = alpha or homology_alphabet(A)
    t_letter = None
    if variant.lower() in ("htilde", "tilde", "h~"):
        t_letter = max(A.dim, max(base_alpha.letters) + 1)
        H_alpha = homology_alphabet(A, {t_letter: 1 - 2 * A.n})
    else:
        H_alpha = base_alpha
    wt = hodge_weight_fn(A, t_letter)
    return _special_slice(A, H_alpha, wt, degree, weight, t_letter)


def theta_weight_shift(A: PDAlgebra, word_weight: int) -> int:
    """Hodge-weight raise of theta_F for F of total class degree ``word_weight``."""
    return word_weight - 2 * A.n


def _special_slice(A, H_alpha, wt, degree, weight_total, t_letter) -> DerSlice:
    shift = theta_weight_shift(A, weight_total)
    gens = [a for a in H_alpha.letters if a != t_letter]
    slots = _der_unknowns(A, H_alpha, wt, gens, degree, shift)
    S = special_element(A, H_alpha)
    # D(S) for each slot
    images = []
    for q, e in slots:
        D = Derivation(H_alpha, {q: e}, degree)
        images.append(D.apply(S))
    keys = sorted({w for img in images for w in img})
    index = {w: i for i, w in enumerate(keys)}
    if keys:
        cols = scalars.dense_rows(images, index)
        # kernel of the map slots -> T: solve sum_s c_s images[s] = 0
        mat = [[cols[s][r] for s in range(len(slots))] for r in range(len(keys))]
        ker = scalars.nullspace(mat, len(slots))
    else:
        ker = [[Fraction(int(i == j)) for j in range(len(slots))] for i in range(len(slots))]
    basis = []
    for v in ker:
        imgs: Dict[int, Tensor] = {}
        for (q, e), c in zip(slots, v):
            if c != 0:
                imgs[q] = t_add(imgs.get(q, {}), t_scale(e, c))
        basis.append(Derivation(H_alpha, {a: x for a, x in imgs.items() if x}, degree))
    return DerSlice(basis, len(slots), len(keys))


def word_class_degree(A: PDAlgebra, w: Sequence[int]) -> int:
    return sum(A.deg(a) for a in w)


def clie_graded(A: PDAlgebra, alpha: Alphabet, length: int) -> Dict[Tuple[int, int], List[CyclicChain]]:
    """CLie basis split by (derivation degree, total class degree)."""
    out: Dict[Tuple[int, int], List[CyclicChain]] = {}
    for d in _degree_range(A, alpha, length):
        chains = clie_slice(A, alpha, length, d)
        parts: Dict[int, List[CyclicChain]] = {}
        for c in chains:
            by: Dict[int, Dict[Word, Scalar]] = {}
            for w, v in c.terms.items():
                by.setdefault(word_class_degree(A, w), {})[w] = v
            for key, terms in by.items():
                parts.setdefault(key, []).append(CyclicChain(alpha, terms, True))
        for cdeg, cs in parts.items():
            basis = reduce_to_basis(alpha, cs)
            if basis:
                out[(d, cdeg)] = basis
    return out


@dataclass
class IsoReport:
    slice_key: Tuple[int, int, int]  # (length, degree, class degree)
    dim_clie: int
    dim_der: int
    theta_rank: int

    @property
    def ok(self) -> bool:
        return self.dim_clie == self.dim_der == self.theta_rank


def iso_dimensions(A: PDAlgebra, max_weight: int, variant: str = "H") -> List[IsoReport]:
    """Compare CLie (x) H with Der^S slice by slice and check theta is a bijection."""
    alpha = homology_alphabet(A)
    reports = []
    for length in range(2, max_weight + 1):
        graded = clie_graded(A, alpha, length)
        keys = set(graded)
        # all derivation slices reachable from words of this length
        for deg_total in _class_degree_range(A, length):
            for d in _degree_range(A, alpha, length):
                keys.add((d, deg_total))
        for (d, cdeg) in sorted(keys):
            clie = graded.get((d, cdeg), [])
            der = special_derivations(A, variant, degree=d, weight=cdeg)
            ths = [theta(A, F) for F in clie]
            # theta images must lie in the Der^S slice; the rank of images plus
            # the slice basis equals the slice dimension when theta is onto
            letters = [a for a in der.basis[0].alpha.letters] if der.basis else list(alpha.letters)
            if der.basis:
                ths = [Derivation(der.basis[0].alpha, D.images, D.degree) for D in ths]
            r = derivation_rank(ths, letters)
            joint = derivation_rank(ths + der.basis, letters)
            if joint != len(der.basis):
                r = -1  # theta leaves the slice
            if not clie and not der.basis:
                continue
            reports.append(IsoReport((length, d, cdeg), len(clie), len(der.basis), r))
    return reports


def _class_degree_range(A: PDAlgebra, length: int) -> List[int]:
    degs = sorted({A.deg(i) for i in A.reduced_indices()})
    vals = set()
    for combo in itertools.combinations_with_replacement(degs, length):
        vals.add(sum(combo))
    return sorted(vals)


def _degree_range(A: PDAlgebra, alpha: Alphabet, length: int) -> List[int]:
    degs = sorted({alpha.deg(a) for a in alpha.letters})
    vals = set()
    for combo in itertools.combinations_with_replacement(degs, length):
        vals.add(sum(combo) + word_shift(A))
    return sorted(vals)


# --------------------------------------------------------------- homology

def cyclic_basis(alpha: Alphabet, length: int, degree: Optional[int] = None) -> List[Word]:
    return canonical_words(alpha, length, degree)


def h0_delta(A: PDAlgebra, weight_cap: int) -> Dict[int, Dict[str, int]]:
    """Per-length dimensions for delta = {Delta, .} on the degree-0 part of CLie (x) H.

    delta raises length by one and derivation degree by one, so H_0 at length w
    is ker(delta on C^0_w) / delta(C^{-1}_{w-1}).
    """
    alpha = homology_alphabet(A)
    Delta = canonical_delta(A, alpha)
    out = {}
    for w in range(2, weight_cap + 1):
        C0 = clie_slice(A, alpha, w, 0)
        rank_out = chain_rank([bracket(A, Delta, F) for F in C0])
        Cm = clie_slice(A, alpha, w - 1, -1) if w - 1 >= 2 else []
        rank_in = chain_rank([bracket(A, Delta, F) for F in Cm])
        out[w] = {"dim": len(C0), "ker": len(C0) - rank_out, "im": rank_in,
                  "h0": len(C0) - rank_out - rank_in}
    return out
