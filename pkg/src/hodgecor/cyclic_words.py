"""Graded cyclic words, the cyclic envelope, shuffles and the cyclic differential.

A word is a tuple of letters (basis indices of a PDAlgebra).  An ``Alphabet``
assigns each letter its shifted degree; only parities enter the signs.
Cyclic chains store one canonical rotation per coinvariant class, with the
graded rotation sign folded into the coefficient.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .pd_algebra import PDAlgebra
from .scalars import Scalar, format_scalar, parse_scalar

Word = Tuple[int, ...]

HOMOLOGY = "homology"
COHOMOLOGY = "cohomology"


@dataclass(frozen=True)
class Alphabet:
    """Ordered letters with shifted degrees."""

    letters: Tuple[int, ...]
    degrees: Tuple[Tuple[int, int], ...]
    side: str
    labels: Tuple[Tuple[int, str], ...] = ()

    def deg(self, letter: int) -> int:
        return self._deg[letter]

    def __post_init__(self):
        object.__setattr__(self, "_deg", dict(self.degrees))
        object.__setattr__(self, "_label", dict(self.labels))

    def label(self, letter: int) -> str:
        return self._label.get(letter, str(letter))

    def word_deg(self, w: Sequence[int]) -> int:
        d = self._deg
        return sum(d[a] for a in w)

    def parity(self, w: Sequence[int]) -> int:
        return self.word_deg(w) & 1


def homology_alphabet(A: PDAlgebra, extra: Optional[Dict[int, int]] = None) -> Alphabet:
    letters = A.reduced_indices()
    degs = [(i, A.hom_deg(i)) for i in letters]
    labels = [(i, "h_" + A.basis[i].label) for i in letters]
    if extra:
        for k, d in extra.items():
            letters.append(k)
            degs.append((k, d))
            labels.append((k, f"t{k}"))
    return Alphabet(tuple(letters), tuple(degs), HOMOLOGY, tuple(labels))


def cohomology_alphabet(A: PDAlgebra) -> Alphabet:
    letters = A.reduced_indices()
    return Alphabet(tuple(letters), tuple((i, A.form_deg(i)) for i in letters), COHOMOLOGY,
                    tuple((i, A.basis[i].label) for i in letters))


# ------------------------------------------------------------------ rotation

def rotation_sign(alpha: Alphabet, w: Sequence[int], r: int) -> int:
    """Sign s with [w] = s [w[r:] + w[:r]] in the coinvariants."""
    if r % max(len(w), 1) == 0:
        return 1
    pre = alpha.parity(w[:r])
    suf = alpha.parity(w[r:])
    return -1 if (pre and suf) else 1


def normalize(alpha: Alphabet, w: Sequence[int]) -> Tuple[Optional[Word], int]:
    """Canonical (lexicographically least) rotation and sign; (None, 0) for zero words."""
    w = tuple(w)
    m = len(w)
    if m == 0:
        return w, 1
    best_r = 0
    best = w
    for r in range(1, m):
        cand = w[r:] + w[:r]
        if cand < best:
            best, best_r = cand, r
    # self-rotation with sign -1 kills the class
    per = period(w)
    if per < m and rotation_sign(alpha, w, per) == -1:
        return None, 0
    return best, rotation_sign(alpha, w, best_r)


def period(w: Sequence[int]) -> int:
    m = len(w)
    for d in range(1, m + 1):
        if m % d == 0 and tuple(w[d:]) + tuple(w[:d]) == tuple(w):
            return d
    return m


def aut_order(w: Sequence[int]) -> int:
    return len(w) // period(w) if w else 1


# -------------------------------------------------------------------- chains

def _acc(d: dict, k, c) -> None:
    v = d.get(k, 0) + c
    if v == 0:
        d.pop(k, None)
    else:
        d[k] = v


@dataclass
class TensorChain:
    terms: Dict[Word, Scalar] = field(default_factory=dict)

    def add(self, w: Word, c) -> None:
        if c != 0:
            _acc(self.terms, tuple(w), c)

    def __add__(self, other: "TensorChain") -> "TensorChain":
        out = TensorChain(dict(self.terms))
        for w, c in other.terms.items():
            out.add(w, c)
        return out

    def scale(self, s) -> "TensorChain":
        return TensorChain({w: s * c for w, c in self.terms.items()} if s != 0 else {})

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, TensorChain) and self.terms == other.terms


@dataclass
class CyclicChain:
    alphabet: Alphabet
    terms: Dict[Word, Scalar] = field(default_factory=dict)
    h_factor: bool = True

    @property
    def side(self) -> str:
        return self.alphabet.side

    def copy(self) -> "CyclicChain":
        return CyclicChain(self.alphabet, dict(self.terms), self.h_factor)

    def add_word(self, w: Sequence[int], c) -> None:
        """Add c * [w] (unweighted class)."""
        if c == 0:
            return
        nw, s = normalize(self.alphabet, w)
        if nw is None:
            return
        _acc(self.terms, nw, s * c)

    def __add__(self, other: "CyclicChain") -> "CyclicChain":
        out = self.copy()
        for w, c in other.terms.items():
            _acc(out.terms, w, c)
        return out

    def scale(self, s) -> "CyclicChain":
        if s == 0:
            return CyclicChain(self.alphabet, {}, self.h_factor)
        return CyclicChain(self.alphabet, {w: s * c for w, c in self.terms.items()}, self.h_factor)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, CyclicChain) and self.terms == other.terms

    def homogeneous_parts(self) -> Dict[Tuple[int, int], "CyclicChain"]:
        """Split by (length, degree)."""
        out: Dict[Tuple[int, int], CyclicChain] = {}
        for w, c in self.terms.items():
            key = (len(w), self.alphabet.word_deg(w))
            out.setdefault(key, CyclicChain(self.alphabet, {}, self.h_factor)).terms[w] = c
        return out

    def degree(self) -> int:
        degs = {self.alphabet.word_deg(w) for w in self.terms}
        if len(degs) > 1:
            raise ValueError("chain is not homogeneous")
        return degs.pop() if degs else 0

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.terms.values()), default=0.0)

    def to_json(self) -> Dict[str, str]:
        out = {}
        for w, c in sorted(self.terms.items()):
            key = "C(" + ",".join(self.alphabet.label(a) for a in w) + ")"
            out[key] = format_scalar(c) if not isinstance(c, complex) else repr(c)
        return out


def zero_chain(alpha: Alphabet, h_factor: bool = True) -> CyclicChain:
    return CyclicChain(alpha, {}, h_factor)


def cyclic_project(alpha: Alphabet, w: Sequence[int], weighted: bool = False,
                   coeff: Scalar = 1) -> CyclicChain:
    """Class of w in the coinvariants; weighted divides by |Aut(W)|."""
    out = zero_chain(alpha)
    c = Fraction(coeff) if isinstance(coeff, int) else coeff
    if weighted:
        c = c / aut_order(w)
    out.add_word(w, c)
    return out


def project_tensor(alpha: Alphabet, t: TensorChain, h_factor: bool = True) -> CyclicChain:
    out = CyclicChain(alpha, {}, h_factor)
    for w, c in t.terms.items():
        out.add_word(w, c)
    return out


# --------------------------------------------------------------- shuffles

def shuffle_sign(alpha: Alphabet, left: Sequence[int], right: Sequence[int],
                 mask: Sequence[int]) -> Tuple[int, Word]:
    """Interleave left/right per mask (0 = take from left); Koszul sign of the reordering."""
    i = j = 0
    sign = 1
    out = []
    rem_left_parity = alpha.parity(left)
    for m in mask:
        if m == 0:
            a = left[i]
            i += 1
            rem_left_parity ^= alpha.deg(a) & 1
            out.append(a)
        else:
            b = right[j]
            j += 1
            # b jumps over the letters of left not yet placed
            if (alpha.deg(b) & 1) and rem_left_parity:
                sign = -sign
            out.append(b)
    return sign, tuple(out)


def shuffles(alpha: Alphabet, left: Sequence[int], right: Sequence[int]) -> Iterator[Tuple[int, Word]]:
    p, q = len(left), len(right)
    for pos in itertools.combinations(range(p + q), q):
        mask = [0] * (p + q)
        for k in pos:
            mask[k] = 1
        yield shuffle_sign(alpha, left, right, mask)


def shuffle_generators(alpha: Alphabet, v0: int, left: Sequence[int], right: Sequence[int],
                       weighted: bool = True) -> CyclicChain:
    if not left or not right:
        raise ValueError("shuffle generators need p, q >= 1")
    out = zero_chain(alpha)
    for s, w in shuffles(alpha, left, right):
        word = (v0,) + w
        c = Fraction(s, aut_order(word)) if weighted else Fraction(s)
        out.add_word(word, c)
    return out


def shuffle_span(alpha: Alphabet, length: int, degree: Optional[int] = None) -> List[CyclicChain]:
    """All shuffle generators of the given total length (optionally one degree)."""
    gens = []
    L = alpha.letters
    for p in range(1, length - 1):
        q = length - 1 - p
        for v0 in L:
            for left in itertools.product(L, repeat=p):
                for right in itertools.product(L, repeat=q):
                    if degree is not None and alpha.deg(v0) + alpha.word_deg(left) + alpha.word_deg(right) != degree:
                        continue
                    g = shuffle_generators(alpha, v0, left, right)
                    if not g.is_zero():
                        gens.append(g)
    return gens


# ------------------------------------------------------ cyclic differential

def _product_letters(A: PDAlgebra, a: int, b: int) -> Dict[int, Scalar]:
    return A.truncate_reduced(A.mul_basis(a, b))


def cyclic_delta(A: PDAlgebra, F: CyclicChain, sign_rule: str = "unshifted") -> CyclicChain:
    """Cyclic-homology differential on the cohomology side: merge cyclic neighbours.

    delta(a_0 ... a_m) = sum over rotations of (-1)^{deg a_m} (a_0 ... a_{m-2}, a_{m-1} a_m).
    ``sign_rule`` selects whether the exponent uses deg a_m or the shifted degree.
    """
    alpha = F.alphabet
    out = CyclicChain(alpha, {}, F.h_factor)
    for w, c in F.terms.items():
        m = len(w)
        if m < 2:
            continue
        for r in range(m):
            rot = w[r:] + w[:r]
            s = rotation_sign(alpha, w, r)
            a, b = rot[-2], rot[-1]
            e = A.deg(b) if sign_rule == "unshifted" else A.form_deg(b)
            s = s * (-1) ** e
            for k, ck in _product_letters(A, a, b).items():
                out.add_word(rot[:-2] + (k,), c * s * ck)
    return out


# ------------------------------------------------------ partial derivatives

def ncpd(F: CyclicChain, p: int, side: str = "right") -> TensorChain:
    """Noncommutative partial derivative: rotations ending (right) or starting (left) with p."""
    alpha = F.alphabet
    out = TensorChain()
    for w, c in F.terms.items():
        m = len(w)
        for j in range(m):
            if w[j] != p:
                continue
            if side == "right":
                r = (j + 1) % m
                rot = w[r:] + w[:r]
                out.add(rot[:-1], c * rotation_sign(alpha, w, r))
            else:
                rot = w[j:] + w[:j]
                out.add(rot[1:], c * rotation_sign(alpha, w, j))
    return out


def ncpd_all(F: CyclicChain, side: str = "right") -> Dict[int, TensorChain]:
    out: Dict[int, TensorChain] = {}
    alpha = F.alphabet
    for w, c in F.terms.items():
        m = len(w)
        for j in range(m):
            if side == "right":
                r = (j + 1) % m
                rot = w[r:] + w[:r]
                out.setdefault(w[j], TensorChain()).add(rot[:-1], c * rotation_sign(alpha, w, r))
            else:
                rot = w[j:] + w[:j]
                out.setdefault(w[j], TensorChain()).add(rot[1:], c * rotation_sign(alpha, w, j))
    return {k: v for k, v in out.items() if not v.is_zero()}


# ------------------------------------------------------------------ pairing

def separation_sign(alpha: Alphabet, w: Sequence[int]) -> int:
    """Sign of separating (a_1|h_1)...(a_m|h_m) into (a_1...a_m)(h_1...h_m)."""
    odd = 0
    s = 0
    for a in reversed(w):
        if alpha.deg(a) & 1:
            s += odd
            odd += 1
    return -1 if s & 1 else 1


def pairing(x: CyclicChain, y: CyclicChain) -> Scalar:
    """Pair a homology chain with a cohomology chain (letter-dual alphabets).

    <[u], [v]> sums, over rotations of v matching u, the rotation sign times
    the separation sign of u; so <[W^vee] , [W]> = eps(W) |Aut W|.
    """
    total = Fraction(0)
    for w, c in x.terms.items():
        d = y.terms.get(w)
        if d is None:
            continue
        total = total + c * d * aut_order(w) * separation_sign(x.alphabet, w)
    return total


def dual_chain(F: CyclicChain, alpha_dual: Alphabet) -> CyclicChain:
    """Same words, reinterpreted over the dual alphabet (letters share indices)."""
    return CyclicChain(alpha_dual, dict(F.terms), F.h_factor)


# -------------------------------------------------------------- cobracket

def cobracket(A: PDAlgebra, x: CyclicChain, alpha_hom: Alphabet) -> Dict[Tuple[Word, Word], Scalar]:
    """Lie cobracket on the cohomology side, as a dict {(W1, W2): coeff} of canonical words.

    Each rotation L of a word W is cut as L = u v (either piece may be empty) and
    the Casimir sum_{p,q} <p cap H cap q> p (x) q is inserted at the cut, giving
    [u p] (x) [q v].  Letters are read on the homology side, and the separation
    signs make the result dual to the bracket: <cobracket(x), F (x) G> = <x, {F, G}>.
    """
    ah = alpha_hom
    red = [a for a in ah.letters]
    omega = {(p, q): A.omega(p, q) for p in red for q in red if A.omega(p, q) != 0}
    out: Dict[Tuple[Word, Word], Scalar] = {}
    for w, c in x.terms.items():
        m = len(w)
        sw = separation_sign(ah, w)
        for r in range(m):
            L = tuple(w[r:] + w[:r])
            rho = rotation_sign(ah, w, r)
            for k in range(m + 1):
                u, v = L[:k], L[k:]
                for (p, q), om in omega.items():
                    U, su = normalize(ah, u + (p,))
                    V, sv = normalize(ah, (q,) + v)
                    if U is None or V is None:
                        continue
                    coeff = c * om * rho * su * sv * sw * separation_sign(ah, U) * separation_sign(ah, V)
                    _acc(out, (U, V), coeff)
    return out


def canonical_words(alpha: Alphabet, length: int, degree: Optional[int] = None) -> List[Word]:
    """Canonical representatives of the nonzero cyclic classes of a given length."""
    out = []
    for w in itertools.product(alpha.letters, repeat=length):
        if degree is not None and alpha.word_deg(w) != degree:
            continue
        nw, s = normalize(alpha, w)
        if nw is not None and nw == w:
            out.append(w)
    return out


# ------------------------------------------------------------------- random

def random_chain(alpha: Alphabet, rng: random.Random, max_len: int, n_terms: int = 3,
                 min_len: int = 1, length: Optional[int] = None, degree: Optional[int] = None,
                 coeff_range: int = 5, h_factor: bool = True) -> CyclicChain:
    """Random homogeneous chain (fixed length and degree when requested)."""
    out = CyclicChain(alpha, {}, h_factor)
    L = alpha.letters
    m = length if length is not None else rng.randint(min_len, max_len)
    target_deg = degree
    tries = 0
    while len(out.terms) < n_terms and tries < 200:
        tries += 1
        w = tuple(rng.choice(L) for _ in range(m))
        if target_deg is None:
            target_deg = alpha.word_deg(w)
        if alpha.word_deg(w) != target_deg:
            continue
        c = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, 3))
        out.add_word(w, c)
    return out


# ------------------------------------------------------------------ parsing

_WORD_RE = re.compile(r"^\s*C\((.*)\)\s*$")


def parse_word(A: PDAlgebra, text: str) -> Tuple[Word, bool]:
    """Parse "C(e1,e2,e1)"; letters may carry a "|h" marker (homology side)."""
    m = _WORD_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse cyclic word {text!r}")
    letters = []
    hom = False
    for tok in m.group(1).split(","):
        tok = tok.strip()
        if tok.endswith("|h"):
            hom = True
            tok = tok[:-2]
        if tok.startswith("h_"):
            hom = True
            tok = tok[2:]
        letters.append(A.index(tok))
    return tuple(letters), hom


def chain_from_json(A: PDAlgebra, alpha: Alphabet, data: Dict[str, str]) -> CyclicChain:
    out = CyclicChain(alpha, {})
    for key, val in data.items():
        w, _ = parse_word(A, key)
        out.add_word(w, parse_scalar(val))
    return out
