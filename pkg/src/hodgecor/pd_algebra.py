"""Finite Poincare-duality algebras modelling H*(X) of a compact Kahler manifold.

Elements are sparse dicts {basis index: exact scalar}.  The homology side is
modelled by the dual basis h_i with <h_i, alpha_j> = delta_ij.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import scalars
from .scalars import Scalar, format_scalar, parse_scalar, simplify

Vec = Dict[int, Scalar]


class ModelLoadError(Exception):
    pass


class SingularPairing(ModelLoadError):
    pass


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class BasisClass:
    label: str
    p: int
    q: int

    @property
    def deg(self) -> int:
        return self.p + self.q

    @property
    def shifted_deg_form(self) -> int:
        return self.deg - 1

    @property
    def shifted_deg_hom(self) -> int:
        return 1 - self.deg


def _add_into(acc: Vec, k: int, c) -> None:
    v = acc.get(k, 0) + c
    if v == 0:
        acc.pop(k, None)
    else:
        acc[k] = v


@dataclass
class PDAlgebra:
    n_complex_dim: int
    basis: List[BasisClass]
    mult: Dict[Tuple[int, int], Vec]
    trace_vec: Dict[int, Scalar]
    conj: Optional[List[int]] = None
    name: str = "custom"
    aliases: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self._index = {b.label: i for i, b in enumerate(self.basis)}
        self.validate()
        self._pairing = [[self.trace(self.mul_basis(i, j)) for j in range(self.dim)]
                         for i in range(self.dim)]
        try:
            self._pairing_inv = scalars.inverse(self._pairing)
        except ZeroDivisionError as exc:
            raise SingularPairing(f"trace pairing of {self.name} is degenerate") from exc

    # ---------------------------------------------------------------- basics
    @property
    def n(self) -> int:
        return self.n_complex_dim

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, label: str) -> int:
        label = self.aliases.get(label, label)
        try:
            return self._index[label]
        except KeyError as exc:
            raise KeyError(f"unknown basis label {label!r} in model {self.name}") from exc

    def deg(self, i: int) -> int:
        return self.basis[i].deg

    def mul_basis(self, i: int, j: int) -> Vec:
        return self.mult.get((i, j), {})

    def mul(self, a: Vec, b: Vec) -> Vec:
        out: Vec = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for k, c in self.mul_basis(i, j).items():
                    _add_into(out, k, ca * cb * c)
        return out

    def trace(self, a: Vec) -> Scalar:
        s = Fraction(0)
        for k, c in a.items():
            t = self.trace_vec.get(k)
            if t:
                s = s + c * t
        return simplify(s)

    @property
    def unit(self) -> int:
        zeros = [i for i, b in enumerate(self.basis) if b.deg == 0]
        if len(zeros) != 1:
            raise ModelLoadError("model must have a unique degree-0 class")
        return zeros[0]

    def top_index(self) -> int:
        tops = [i for i, b in enumerate(self.basis) if b.deg == 2 * self.n]
        if len(tops) != 1:
            raise ModelLoadError("model must have a one-dimensional top degree")
        return tops[0]

    def pairing_matrix(self) -> List[List[Scalar]]:
        return [row[:] for row in self._pairing]

    # ------------------------------------------------------------ validation
    def validate(self) -> None:
        n = self.n
        for b in self.basis:
            if not (0 <= b.p <= n and 0 <= b.q <= n):
                raise ModelLoadError(f"bidegree of {b.label} outside [0, n]")
        for (i, j), v in self.mult.items():
            for k in v:
                if self.deg(k) != self.deg(i) + self.deg(j):
                    raise ModelLoadError(f"product {i}*{j} is not degree-homogeneous")
        for k, t in self.trace_vec.items():
            if t and self.deg(k) != 2 * n:
                raise ModelLoadError("trace must vanish outside top degree")
        u = self.unit
        for i in range(self.dim):
            if self.mul_basis(u, i) != {i: 1} or self.mul_basis(i, u) != {i: 1}:
                raise ModelLoadError("degree-0 class is not a unit")
        for i in range(self.dim):
            for j in range(self.dim):
                s = (-1) ** (self.deg(i) * self.deg(j))
                ab = self.mul_basis(i, j)
                ba = {k: s * c for k, c in self.mul_basis(j, i).items()}
                if ab != ba:
                    raise ModelLoadError(f"graded commutativity fails for {i},{j}")
        for i, j, k in itertools.product(range(self.dim), repeat=3):
            left = self.mul(self.mul_basis(i, j), {k: 1})
            right = self.mul({i: 1}, self.mul_basis(j, k))
            if left != right:
                raise ModelLoadError(f"associativity fails for {i},{j},{k}")

    # -------------------------------------------------------- reduced parts
    def reduced_indices(self) -> List[int]:
        return [i for i, b in enumerate(self.basis) if 0 < b.deg < 2 * self.n]

    def reduced_basis(self) -> List[BasisClass]:
        return [self.basis[i] for i in self.reduced_indices()]

    def truncate_reduced(self, a: Vec) -> Vec:
        return {k: c for k, c in a.items() if 0 < self.deg(k) < 2 * self.n}

    def dual_basis(self) -> Dict[int, Vec]:
        """alpha_i^vee with trace(alpha_i . alpha_j^vee) = delta_ij."""
        # P[i][j] = tr(a_i a_j); want D with sum_k P[i][k] D[k][j] = delta_ij
        inv = self._pairing_inv
        out = {}
        for j in range(self.dim):
            out[j] = {k: simplify(inv[k][j]) for k in range(self.dim) if inv[k][j] != 0}
        return out

    def pairing_inverse(self) -> List[List[Scalar]]:
        return [row[:] for row in self._pairing_inv]

    # ----------------------------------------------------- homology letters
    def hom_deg(self, i: int) -> int:
        """Shifted degree of the homology letter dual to basis class i."""
        return 1 - self.deg(i)

    def form_deg(self, i: int) -> int:
        return self.deg(i) - 1

    def hodge_weight(self, i: int) -> int:
        """Hodge weight of the homology letter dual to class i."""
        return -self.deg(i)

    def omega(self, i: int, j: int) -> Scalar:
        """Symplectic pairing <h_i cap H cap h_j> of the homology letters dual to i, j."""
        s = (-1) ** self.deg(i)
        return simplify(s * self._pairing_inv[j][i])

    def omega_matrix(self, indices: Optional[Sequence[int]] = None):
        idx = self.reduced_indices() if indices is None else list(indices)
        return {(a, b): self.omega(a, b) for a in idx for b in idx if self.omega(a, b) != 0}

    def conj_index(self, i: int) -> int:
        if self.conj is None:
            raise ValueError("model carries no conjugation")
        return self.conj[i]

    # ------------------------------------------------------------ elements
    def element(self, label: str) -> Vec:
        return {self.index(label): Fraction(1)}

    def labels(self) -> List[str]:
        return [b.label for b in self.basis]

    def to_json(self) -> dict:
        mult = []
        for (i, j), v in sorted(self.mult.items()):
            if v:
                mult.append([i, j, [[k, format_scalar(c)] for k, c in sorted(v.items())]])
        return {
            "name": self.name,
            "n": self.n,
            "basis": [{"label": b.label, "p": b.p, "q": b.q} for b in self.basis],
            "mult": mult,
            "trace": [[k, format_scalar(c)] for k, c in sorted(self.trace_vec.items()) if c],
            "conj": self.conj,
            "aliases": self.aliases,
        }


def symplectic_pairing(A: PDAlgebra, a: Vec, b: Vec) -> Scalar:
    """<a cap H cap b> for homology vectors a, b (coefficients on dual letters)."""
    s = Fraction(0)
    for i, ca in a.items():
        for j, cb in b.items():
            w = A.omega(i, j)
            if w:
                s = s + ca * cb * w
    return simplify(s)


def reduced_basis(A: PDAlgebra) -> List[BasisClass]:
    return A.reduced_basis()


def dual_basis(A: PDAlgebra) -> Dict[int, Vec]:
    return A.dual_basis()


# ------------------------------------------------------------------ loading

def algebra_from_json(data: dict) -> PDAlgebra:
    try:
        n = int(data["n"])
        basis = [BasisClass(b["label"], int(b["p"]), int(b["q"])) for b in data["basis"]]
        mult: Dict[Tuple[int, int], Vec] = {}
        for i, j, terms in data["mult"]:
            mult[(int(i), int(j))] = {int(k): parse_scalar(c) for k, c in terms if parse_scalar(c) != 0}
        trace = {int(k): parse_scalar(c) for k, c in data["trace"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelLoadError(f"malformed algebra model: {exc}") from exc
    return PDAlgebra(n, basis, mult, trace, conj=data.get("conj"), name=data.get("name", "custom"),
                     aliases=data.get("aliases") or {})


def load_algebra(path: str | Path) -> PDAlgebra:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelLoadError(f"cannot read model file {path}: {exc}") from exc
    return algebra_from_json(data)


# ------------------------------------------------------------ shipped models

def exterior_model(num_gens: int, types: Sequence[Tuple[int, int]], labels: Sequence[str],
                   n: int, name: str) -> PDAlgebra:
    """Full exterior algebra on odd degree-1 generators with trace on the top monomial."""
    mons = sorted(range(1 << num_gens), key=lambda m: (bin(m).count("1"), m))
    idx = {m: i for i, m in enumerate(mons)}

    def label(m):
        if m == 0:
            return "1"
        return "".join(labels[g] for g in range(num_gens) if m >> g & 1)

    basis = []
    for m in mons:
        p = sum(types[g][0] for g in range(num_gens) if m >> g & 1)
        q = sum(types[g][1] for g in range(num_gens) if m >> g & 1)
        basis.append(BasisClass(label(m), p, q))
    mult: Dict[Tuple[int, int], Vec] = {}
    for a in mons:
        for b in mons:
            if a & b:
                continue
            # sign of merging sorted generator lists
            sign = 1
            for g in range(num_gens):
                if b >> g & 1:
                    sign *= (-1) ** bin(a >> (g + 1)).count("1")
            mult[(idx[a], idx[b])] = {idx[a | b]: Fraction(sign)}
    trace = {idx[(1 << num_gens) - 1]: Fraction(1)}
    conj = None
    return PDAlgebra(n, basis, mult, trace, conj=conj, name=name)


def elliptic() -> PDAlgebra:
    """H*(E) = Lambda(e1, e2), e1 ~ dz, e2 ~ (i/2 Im tau) dzbar, e1 e2 = vol."""
    A = exterior_model(2, [(1, 0), (0, 1)], ["e1", "e2"], 1, "elliptic")
    A.aliases = {"dz": "e1", "dzbar": "e2"}
    A.conj = [A.index(lbl) for lbl in ["1", "e2", "e1", "e1e2"]]
    return A


def abelian_surface() -> PDAlgebra:
    """H*(E x E) = Lambda(e1, e2, e3, e4) with e1, e3 of type (1,0), e2, e4 of type (0,1)."""
    A = exterior_model(4, [(1, 0), (0, 1), (1, 0), (0, 1)], ["e1", "e2", "e3", "e4"], 2, "ab-surface")
    A.aliases = {"dz1": "e1", "dzbar1": "e2", "dz2": "e3", "dzbar2": "e4"}
    swap = {"1": "2", "2": "1", "3": "4", "4": "3"}
    conj = []
    for b in A.basis:
        if b.label == "1":
            conj.append(A.index("1"))
            continue
        digits = sorted(swap[c] for c in b.label if c.isdigit())
        conj.append(A.index("".join("e" + d for d in digits)))
    A.conj = conj
    return A


def genus_g(g: int) -> PDAlgebra:
    """H*(curve of genus g): classes a_i (1,0), b_i (0,1) with a_i b_i = vol."""
    basis = [BasisClass("1", 0, 0)]
    basis += [BasisClass(f"a{i}", 1, 0) for i in range(1, g + 1)]
    basis += [BasisClass(f"b{i}", 0, 1) for i in range(1, g + 1)]
    basis += [BasisClass("vol", 1, 1)]
    top = len(basis) - 1
    mult: Dict[Tuple[int, int], Vec] = {}
    for i in range(len(basis)):
        mult[(0, i)] = {i: Fraction(1)}
        mult[(i, 0)] = {i: Fraction(1)}
    for i in range(1, g + 1):
        mult[(i, g + i)] = {top: Fraction(1)}
        mult[(g + i, i)] = {top: Fraction(-1)}
    conj = [0] + [g + i for i in range(1, g + 1)] + [i for i in range(1, g + 1)] + [top]
    return PDAlgebra(1, basis, mult, {top: Fraction(1)}, conj=conj, name=f"genus-{g}")


def projective_space(n: int) -> PDAlgebra:
    basis = [BasisClass("1" if j == 0 else f"h{j}", j, j) for j in range(n + 1)]
    mult = {(i, j): {i + j: Fraction(1)} for i in range(n + 1) for j in range(n + 1) if i + j <= n}
    return PDAlgebra(n, basis, mult, {n: Fraction(1)}, name=f"P{n}")


def tensor_product(A: PDAlgebra, B: PDAlgebra, name: Optional[str] = None) -> PDAlgebra:
    """Graded tensor product (models H*(X x Y)); labels 'a|b'."""
    pairs = [(i, j) for i in range(A.dim) for j in range(B.dim)]
    pairs.sort(key=lambda ij: (A.deg(ij[0]) + B.deg(ij[1]), ij))
    idx = {ij: k for k, ij in enumerate(pairs)}
    basis = [BasisClass(f"{A.basis[i].label}|{B.basis[j].label}", A.basis[i].p + B.basis[j].p,
                        A.basis[i].q + B.basis[j].q) for i, j in pairs]
    mult: Dict[Tuple[int, int], Vec] = {}
    for (i, j) in pairs:
        for (k, l) in pairs:
            sign = (-1) ** (B.deg(j) * A.deg(k))
            out: Vec = {}
            for a, ca in A.mul_basis(i, k).items():
                for b, cb in B.mul_basis(j, l).items():
                    _add_into(out, idx[(a, b)], sign * ca * cb)
            if out:
                mult[(idx[(i, j)], idx[(k, l)])] = out
    trace = {}
    for (i, j) in pairs:
        t = A.trace_vec.get(i, 0) * B.trace_vec.get(j, 0)
        if t:
            trace[idx[(i, j)]] = t
    conj = None
    if A.conj is not None and B.conj is not None:
        conj = [idx[(A.conj[i], B.conj[j])] for i, j in pairs]
    return PDAlgebra(A.n + B.n, basis, mult, trace, conj=conj,
                     name=name or f"{A.name}x{B.name}")


MODELS = {
    "elliptic": elliptic,
    "ab-surface": abelian_surface,
    "genus-2": lambda: genus_g(2),
    "P1": lambda: projective_space(1),
    "P2": lambda: projective_space(2),
}


def get_model(name: str) -> PDAlgebra:
    if name in MODELS:
        return MODELS[name]()
    if name.startswith("genus-"):
        return genus_g(int(name.split("-", 1)[1]))
    if name.startswith("P") and name[1:].isdigit():
        return projective_space(int(name[1:]))
    p = Path(name)
    if p.exists():
        return load_algebra(p)
    builtin = Path(__file__).parent / "models" / f"{name}.json"
    if builtin.exists():
        return load_algebra(builtin)
    raise ModelLoadError(f"unknown model {name!r}")


# --------------------------------------------------------------- morphisms

@dataclass
class AlgebraMorphism:
    """f: X -> Y given by the pullback f*: H*(Y) -> H*(X).

    pullback[j] is the image f*(basis_Y[j]) as a vector over basis_X.
    """

    source: PDAlgebra  # X
    target: PDAlgebra  # Y
    pullback: Dict[int, Vec]
    name: str = "f"

    def __post_init__(self):
        X, Y = self.source, self.target
        if set(self.pullback) != set(range(Y.dim)):
            raise DimensionMismatch("pullback must be given on every basis class of the target")
        if self.pull({Y.unit: 1}) != {X.unit: 1}:
            raise DimensionMismatch("pullback is not unital")
        for j in range(Y.dim):
            for k in self.pullback[j]:
                if X.deg(k) != Y.deg(j):
                    raise DimensionMismatch("pullback must preserve degree")
        for i in range(Y.dim):
            for j in range(Y.dim):
                lhs = self.pull(Y.mul_basis(i, j))
                rhs = X.mul(self.pullback[i], self.pullback[j])
                if lhs != rhs:
                    raise DimensionMismatch(f"pullback is not multiplicative on {i},{j}")

    def pull(self, v: Vec) -> Vec:
        out: Vec = {}
        for j, c in v.items():
            for k, d in self.pullback[j].items():
                _add_into(out, k, c * d)
        return out

    # homology vectors are coefficient dicts on dual letters
    def push_hom(self, h: Vec) -> Vec:
        """f_*: H_*(X) -> H_*(Y), the dual of f*."""
        out: Vec = {}
        for j in range(self.target.dim):
            s = sum((h.get(k, 0) * d for k, d in self.pullback[j].items()), Fraction(0))
            if s != 0:
                out[j] = s
        return out

    def shriek_hom(self, c: Vec) -> Vec:
        """f^!: H_*(Y) -> H_*(X) defined by f^!(c) cap H_X = f*(c cap H_Y)."""
        X, Y = self.source, self.target
        return hom_from_cap(X, self.pull(cap_fundamental(Y, c)))

    def shriek_coh(self, a: Vec) -> Vec:
        """f_!: H*(X) -> H*(Y), the dual of f^!."""
        Y = self.target
        out: Vec = {}
        for j in range(Y.dim):
            img = self.shriek_hom({j: Fraction(1)})
            s = sum((a.get(k, 0) * d for k, d in img.items()), Fraction(0))
            if s != 0:
                out[j] = s
        return out


def cap_fundamental(A: PDAlgebra, h: Vec) -> Vec:
    """Poincare dual class c with trace(c . a) = <h, a> for all a."""
    # c = sum_k c_k a_k with sum_k c_k P[k][j] = h_j, i.e. c = h P^{-1}
    inv = A.pairing_inverse()
    out: Vec = {}
    for j, hj in h.items():
        for k in range(A.dim):
            if inv[j][k] != 0:
                _add_into(out, k, hj * inv[j][k])
    return out


def hom_from_cap(A: PDAlgebra, c: Vec) -> Vec:
    """Inverse of cap_fundamental: the homology vector h with h cap H = c."""
    out: Vec = {}
    for j in range(A.dim):
        s = A.trace(A.mul(c, {j: Fraction(1)}))
        if s != 0:
            out[j] = s
    return out


def functor_maps(f: AlgebraMorphism):
    """(f_*, f_!, f^!) as callables on sparse vectors."""
    return f.push_hom, f.shriek_coh, f.shriek_hom


def hom_pairing(A: PDAlgebra, c0: Vec, h: Vec) -> Scalar:
    """<c0 cap H cap h>: evaluate the Poincare dual of c0 on the homology class h."""
    dual = cap_fundamental(A, c0)
    return simplify(sum((c * h.get(k, 0) for k, c in dual.items()), Fraction(0)))


def identity_morphism(A: PDAlgebra) -> AlgebraMorphism:
    return AlgebraMorphism(A, A, {j: {j: Fraction(1)} for j in range(A.dim)}, name=f"id_{A.name}")


def diagonal_morphism(E: Optional[PDAlgebra] = None) -> AlgebraMorphism:
    """Diagonal E -> E x E: f*(a|b) = a . b."""
    E = E or elliptic()
    EE = tensor_product(E, E, name="ExE")
    pull = {}
    for k, b in enumerate(EE.basis):
        la, lb = b.label.split("|")
        pull[k] = E.mul(E.element(la), E.element(lb))
    return AlgebraMorphism(E, EE, pull, name="diagonal")


def projection_morphism(E: Optional[PDAlgebra] = None) -> AlgebraMorphism:
    """First projection E x E -> E: f*(a) = a|1."""
    E = E or elliptic()
    EE = tensor_product(E, E, name="ExE")
    pull = {j: {EE.index(f"{E.basis[j].label}|1"): Fraction(1)} for j in range(E.dim)}
    return AlgebraMorphism(EE, E, pull, name="projection")


def shipped_morphisms() -> List[AlgebraMorphism]:
    return [identity_morphism(elliptic()), identity_morphism(abelian_surface()),
            diagonal_morphism(), projection_morphism()]
