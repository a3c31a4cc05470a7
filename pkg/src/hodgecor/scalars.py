"""Exact scalars (rationals and Gaussian rationals) and exact linear algebra.

Rational matrices go through python-flint; matrices with Gaussian entries
fall back to a plain elimination over Q(i).
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

import flint


class GaussianRational:
    """a + b*i with rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re_part=0, im_part=0):
        self.re = Fraction(re_part)
        self.im = Fraction(im_part)

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussianRational(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational((self.re * o.re + self.im * o.im) / den,
                                (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"


Scalar = Union[int, Fraction, GaussianRational]

I = GaussianRational(0, 1)

_GAUSS_RE = re.compile(r"^\s*([+-]?[0-9]+(?:/[0-9]+)?)?\s*(?:([+-])\s*([0-9]+(?:/[0-9]+)?)?\s*\*?\s*i)?\s*$")


def parse_scalar(text: str | int | float) -> Scalar:
    """Parse "num/den" or "a/b+c/d*i" into an exact scalar."""
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise ValueError("floats are not exact scalars")
    s = text.replace(" ", "")
    if "i" not in s:
        return Fraction(s)
    if s in ("i", "+i"):
        return GaussianRational(0, 1)
    if s == "-i":
        return GaussianRational(0, -1)
    m = _GAUSS_RE.match(s)
    if m is None:
        # pure imaginary like "3/2*i" or "-i"
        m2 = re.match(r"^([+-]?)([0-9]+(?:/[0-9]+)?)?\*?i$", s)
        if m2 is None:
            raise ValueError(f"cannot parse scalar {text!r}")
        sign = -1 if m2.group(1) == "-" else 1
        mag = Fraction(m2.group(2)) if m2.group(2) else Fraction(1)
        return GaussianRational(0, sign * mag)
    re_part = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    sign = -1 if m.group(2) == "-" else 1
    im_part = Fraction(m.group(3)) if m.group(3) else Fraction(1)
    return simplify(GaussianRational(re_part, sign * im_part))


def format_scalar(x: Scalar) -> str:
    x = simplify(x)
    if isinstance(x, GaussianRational):
        im = x.im
        sign = "+" if im >= 0 else "-"
        return f"{x.re}{sign}{abs(im)}*i"
    return str(Fraction(x))


def simplify(x: Scalar) -> Scalar:
    """Demote Gaussian rationals with zero imaginary part to Fraction."""
    if isinstance(x, GaussianRational):
        if x.im == 0:
            return x.re
        return x
    return Fraction(x)


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) or (isinstance(x, GaussianRational) and x.im == 0)


def to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(x)
    return complex(float(x))


# ---------------------------------------------------------------- linear algebra

def _all_rational(rows: Sequence[Sequence[Scalar]]) -> bool:
    return all(is_rational(v) for row in rows for v in row)


def _to_fmpq(x) -> flint.fmpq:
    x = simplify(x)
    return flint.fmpq(x.numerator, x.denominator)


def _fmpq_mat(rows: Sequence[Sequence[Scalar]], ncols: int) -> flint.fmpq_mat:
    flat = [_to_fmpq(v) for row in rows for v in row]
    return flint.fmpq_mat(len(rows), ncols, flat)


def _from_fmpq(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def _rref_generic(rows: list[list[Scalar]], ncols: int):
    """Plain Gauss-Jordan elimination; returns (rref rows, pivot columns)."""
    a = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(a)):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c] if not isinstance(a[r][c], int) else Fraction(1, a[r][c])
        a[r] = [v * inv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [vi - f * vr for vi, vr in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rref(rows: Sequence[Sequence[Scalar]], ncols: int):
    """Reduced row echelon form. Returns (nonzero rows as lists, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows or ncols == 0:
        return [], []
    if _all_rational(rows):
        m, rk = _fmpq_mat(rows, ncols).rref()
        out = []
        pivots = []
        for i in range(rk):
            row = [_from_fmpq(m[i, j]) for j in range(ncols)]
            out.append(row)
            pivots.append(next(j for j, v in enumerate(row) if v != 0))
        return out, pivots
    return _rref_generic(rows, ncols)


def rank(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    if ncols == 0:
        return 0
    if _all_rational(rows):
        return int(_fmpq_mat(rows, ncols).rank())
    return len(_rref_generic(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence[Scalar]], ncols: int) -> list[list[Scalar]]:
    """Basis of {x : A x = 0} for the matrix with the given rows."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve_left(basis_rows: Sequence[Sequence[Scalar]], target: Sequence[Scalar]):
    """Coefficients c with sum_i c_i * basis_rows[i] == target, or None."""
    n = len(basis_rows)
    if n == 0:
        return [] if all(v == 0 for v in target) else None
    ncols = len(target)
    # columns = basis vectors; augmented system
    aug = [[basis_rows[i][j] for i in range(n)] + [target[j]] for j in range(ncols)]
    red, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    c = [Fraction(0)] * n
    for row, p in zip(red, pivots):
        c[p] = row[n]
    return c


def inverse(rows: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    n = len(rows)
    if _all_rational(rows):
        m = _fmpq_mat(rows, n)
        if m.rank() < n:
            raise ZeroDivisionError("singular matrix")
        inv = m.inv()
        return [[_from_fmpq(inv[i, j]) for j in range(n)] for i in range(n)]
    aug = [list(rows[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, pivots = _rref_generic(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return [[simplify(v) for v in red[i][n:]] for i in range(n)]


def dense_rows(vectors: Iterable[dict], index: dict) -> list[list[Scalar]]:
    """Turn sparse {key: coeff} vectors into dense rows over a key index."""
    out = []
    n = len(index)
    for v in vectors:
        row = [Fraction(0)] * n
        for k, c in v.items():
            row[index[k]] = c
        out.append(row)
    return out


def _sparse_fmpq(vectors: Sequence[dict], index: dict) -> flint.fmpq_mat:
    m = flint.fmpq_mat(len(vectors), len(index))
    for i, v in enumerate(vectors):
        for k, c in v.items():
            if c != 0:
                m[i, index[k]] = _to_fmpq(c)
    return m


def sparse_rank(vectors: Sequence[dict]) -> int:
    """Rank of sparse {key: coeff} vectors."""
    vectors = [v for v in vectors if v]
    if not vectors:
        return 0
    keys = sorted({k for v in vectors for k in v})
    index = {k: i for i, k in enumerate(keys)}
    if all(is_rational(c) for v in vectors for c in v.values()):
        return int(_sparse_fmpq(vectors, index).rank())
    return rank(dense_rows(vectors, index), len(keys))


def sparse_rref(vectors: Sequence[dict]) -> list[dict]:
    """Row-reduced basis of the span of sparse vectors, as sparse dicts."""
    vectors = [v for v in vectors if v]
    if not vectors:
        return []
    keys = sorted({k for v in vectors for k in v})
    index = {k: i for i, k in enumerate(keys)}
    if all(is_rational(c) for v in vectors for c in v.values()):
        m, rk = _sparse_fmpq(vectors, index).rref()
        out = []
        for i in range(rk):
            row = {}
            for j in range(len(keys)):
                q = m[i, j]
                if q != 0:
                    row[keys[j]] = _from_fmpq(q)
            out.append(row)
        return out
    red, _ = _rref_generic(dense_rows(vectors, index), len(keys))
    return [{keys[j]: v for j, v in enumerate(r) if v != 0} for r in red]
