"""Polydifferential operators omega, xi, eta and a Fourier backend on flat tori.

Operators are stored as pre-symmetrization patterns: a pattern assigns to each
position one of "id", "d" (the operator partial) or "db" (partial-bar), and the
operator is Sym over the slots of the pattern sum.  Differentiated positions can
be permuted freely inside Sym (the Koszul sign of the reordered factors equals
the Sym sign), which is how patterns are collected.

The Fourier backend lives on a product of elliptic curves E_tau_1 x ... x E_tau_n
with real coordinates (s_j, t_j), z_j = s_j + tau_j t_j.  Differential forms are
sums of constant exterior monomials in dz_1, dzbar_1, dz_2, ... (generator 2j is
dz_{j+1}, generator 2j+1 is dzbar_{j+1}) with band-limited Fourier coefficients.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import convolve, fftconvolve

ID, D, DB = "id", "d", "db"


class BandwidthOverflow(ValueError):
    pass


class NotTopDegree(ValueError):
    pass


# ------------------------------------------------------------- term lists

Pattern = Tuple[str, ...]


@dataclass
class OperatorTermList:
    name: str
    arity: int
    patterns: List[Tuple[Fraction, Pattern]]

    def coefficient(self, pattern: Pattern) -> Fraction:
        for c, p in self.patterns:
            if p == pattern:
                return c
        return Fraction(0)

    def slot_terms(self, degrees: Sequence[int]) -> Dict[Pattern, Fraction]:
        """Expand Sym: {slot assignment: coeff}, each term wedged in slot order."""
        return slot_expansion(self, tuple(degrees))


def _canonical(pattern: Sequence[str]) -> Pattern:
    """Sort differentiated positions ("d" before "db") keeping the id position."""
    ids = [i for i, o in enumerate(pattern) if o == ID]
    diff = sorted((o for o in pattern if o != ID), key=lambda o: 0 if o == D else 1)
    out = []
    it = iter(diff)
    for i in range(len(pattern)):
        out.append(ID if i in ids else next(it))
    return tuple(out)


def collect(patterns: Sequence[Tuple[Fraction, Sequence[str]]]) -> List[Tuple[Fraction, Pattern]]:
    acc: Dict[Pattern, Fraction] = {}
    for c, p in patterns:
        key = _canonical(p)
        acc[key] = acc.get(key, Fraction(0)) + c
    return sorted(((c, p) for p, c in acc.items() if c != 0), key=lambda t: t[1])


def _dC_power(n: int) -> List[Tuple[Fraction, Tuple[str, ...]]]:
    """Raw expansion of d^C x ... x d^C (n factors), d^C = d - db."""
    out = []
    for ops in itertools.product((D, DB), repeat=n):
        out.append((Fraction((-1) ** sum(o == DB for o in ops)), ops))
    return out


def expand_omega(m: int) -> OperatorTermList:
    pre = Fraction(1, math.factorial(m + 1))
    raw = [(pre * (-1) ** k, (ID,) + (D,) * k + (DB,) * (m - k)) for k in range(m + 1)]
    return OperatorTermList("omega", m + 1, collect(raw))


def expand_xi(m: int) -> OperatorTermList:
    pre = Fraction(1, math.factorial(m + 1))
    raw = [(pre * c, (ID,) + ops) for c, ops in _dC_power(m)]
    return OperatorTermList("xi", m + 1, collect(raw))


def expand_eta(m: int) -> OperatorTermList:
    pre = Fraction(1, math.factorial(m + 1))
    raw = [(pre * c, ops) for c, ops in _dC_power(m + 1)]
    return OperatorTermList("eta", m + 1, collect(raw))


def expand(name: str, m: int) -> OperatorTermList:
    return {"omega": expand_omega, "xi": expand_xi, "eta": expand_eta}[name](m)


def binomial_pattern(name: str, m: int, k: int) -> Fraction:
    """Collected coefficient of id, d^k, db^(m-k) (xi) or d^(k+1), db^(m-k) (eta)."""
    pre = Fraction(1, math.factorial(m + 1))
    if name == "xi":
        return pre * (-1) ** (m - k) * math.comb(m, k)
    if name == "eta":
        return pre * (-1) ** (m - k) * math.comb(m + 1, k + 1)
    raise ValueError(name)


def sym_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of f_{perm(0)}, f_{perm(1)}, ... against f_0, f_1, ... under the shifted rule."""
    seq = list(perm)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j] and (degrees[seq[i]] + 1) * (degrees[seq[j]] + 1) % 2:
                sign = -sign
    return sign


def koszul_sign(order: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of reordering factors listed in ``order`` (with given degrees) into ascending order."""
    sign = 1
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if order[i] > order[j] and degrees[order[i]] * degrees[order[j]] % 2:
                sign = -sign
    return sign


_SLOT_CACHE: Dict[tuple, Dict[Pattern, Fraction]] = {}


def slot_expansion(ops: OperatorTermList, degrees: Tuple[int, ...]) -> Dict[Pattern, Fraction]:
    key = (ops.name, ops.arity, tuple(ops.patterns), degrees)
    if key in _SLOT_CACHE:
        return _SLOT_CACHE[key]
    n = ops.arity
    out: Dict[Pattern, Fraction] = {}
    for c, pat in ops.patterns:
        for perm in itertools.permutations(range(n)):
            # position p carries slot perm[p] with operator pat[p]
            s = sym_sign(perm, degrees)
            assign = [None] * n
            fdeg = [0] * n
            for p, slot in enumerate(perm):
                assign[slot] = pat[p]
                fdeg[slot] = degrees[slot] + (pat[p] != ID)
            s *= koszul_sign(perm, fdeg)
            a = tuple(assign)
            out[a] = out.get(a, Fraction(0)) + s * c
    out = {a: v for a, v in out.items() if v != 0}
    _SLOT_CACHE[key] = out
    return out


# ------------------------------------------------------------ Fourier forms

@dataclass(frozen=True)
class Torus:
    taus: Tuple[complex, ...]

    @property
    def n(self) -> int:
        return len(self.taus)

    @property
    def real_dim(self) -> int:
        return 2 * len(self.taus)

    @property
    def top_mask(self) -> int:
        return (1 << (2 * self.n)) - 1

    def top_integral(self) -> complex:
        """Integral of dz_1 ^ dzbar_1 ^ ... ^ dz_n ^ dzbar_n over the torus."""
        out = 1 + 0j
        for tau in self.taus:
            out *= -2j * tau.imag
        return out


def elliptic_torus(tau: complex = complex(0.5, math.sqrt(3) / 2)) -> Torus:
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    return Torus((complex(tau),))


def mask_sign(a: int, b: int) -> int:
    """Sign of dx_A ^ dx_B = sign * dx_{A u B}; 0 when the masks overlap."""
    if a & b:
        return 0
    s = 0
    bb = b
    while bb:
        low = bb & -bb
        # generators of a above this b generator must pass it
        s += bin(a & ~((low << 1) - 1)).count("1")
        bb ^= low
    return -1 if s & 1 else 1


def popcount(x: int) -> int:
    return bin(x).count("1")


class FourierForm:
    """Band-limited differential form on a flat torus."""

    def __init__(self, torus: Torus, band: int, comps: Optional[Dict[int, np.ndarray]] = None,
                 cap: int = 128):
        self.torus = torus
        self.band = int(band)
        self.cap = cap
        self.comps: Dict[int, np.ndarray] = {}
        for mask, arr in (comps or {}).items():
            arr = np.asarray(arr, dtype=complex)
            if arr.shape != self.shape:
                raise ValueError(f"coefficient array shape {arr.shape} != {self.shape}")
            self.comps[mask] = arr

    @property
    def shape(self) -> Tuple[int, ...]:
        return (2 * self.band + 1,) * self.torus.real_dim

    # construction
    @staticmethod
    def zero(torus: Torus, band: int = 0) -> "FourierForm":
        return FourierForm(torus, band)

    @staticmethod
    def constant(torus: Torus, mask: int, value: complex = 1.0, band: int = 0) -> "FourierForm":
        f = FourierForm(torus, band)
        arr = np.zeros(f.shape, dtype=complex)
        arr[(band,) * torus.real_dim] = value
        f.comps[mask] = arr
        return f

    @staticmethod
    def mode(torus: Torus, mask: int, k: Sequence[int], value: complex = 1.0, band: Optional[int] = None) -> "FourierForm":
        B = band if band is not None else max(abs(x) for x in k)
        f = FourierForm(torus, B)
        arr = np.zeros(f.shape, dtype=complex)
        arr[tuple(B + x for x in k)] = value
        f.comps[mask] = arr
        return f

    @staticmethod
    def random(torus: Torus, band: int, degree: int, rng: np.random.Generator, decay: float = 0.5) -> "FourierForm":
        f = FourierForm(torus, band)
        grids = np.meshgrid(*[np.arange(-band, band + 1)] * torus.real_dim, indexing="ij")
        weight = np.exp(-decay * sum(np.abs(g) for g in grids))
        for mask in range(1 << torus.real_dim):
            if popcount(mask) != degree:
                continue
            z = rng.standard_normal(f.shape) + 1j * rng.standard_normal(f.shape)
            f.comps[mask] = z * weight
        return f

    def copy(self) -> "FourierForm":
        return FourierForm(self.torus, self.band, {m: a.copy() for m, a in self.comps.items()}, self.cap)

    # grading
    def degrees(self) -> List[int]:
        return sorted({popcount(m) for m, a in self.comps.items() if np.any(a != 0)})

    def homogeneous(self) -> Dict[int, "FourierForm"]:
        out: Dict[int, FourierForm] = {}
        for mask, arr in self.comps.items():
            d = popcount(mask)
            out.setdefault(d, FourierForm(self.torus, self.band, cap=self.cap)).comps[mask] = arr
        return out

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("form is not homogeneous")
        return ds[0] if ds else 0

    # band handling
    def padded(self, band: int) -> "FourierForm":
        if band == self.band:
            return self
        if band < self.band:
            return self.truncated(band)
        p = band - self.band
        return FourierForm(self.torus, band, {m: np.pad(a, p) for m, a in self.comps.items()}, self.cap)

    def truncated(self, band: int, tol: Optional[float] = None) -> "FourierForm":
        if band >= self.band:
            return self.padded(band)
        p = self.band - band
        sl = tuple(slice(p, p + 2 * band + 1) for _ in range(self.torus.real_dim))
        out = {}
        for m, a in self.comps.items():
            kept = a[sl]
            if tol is not None:
                total = np.sum(np.abs(a) ** 2)
                lost = total - np.sum(np.abs(kept) ** 2)
                if total > 0 and lost > tol * tol * total:
                    raise BandwidthOverflow(f"truncation to band {band} drops relative mass {math.sqrt(lost / total):.2e}")
            out[m] = kept.copy()
        return FourierForm(self.torus, band, out, self.cap)

    # linear structure
    def _aligned(self, other: "FourierForm"):
        if self.torus != other.torus:
            raise ValueError("forms live on different tori")
        B = max(self.band, other.band)
        return self.padded(B), other.padded(B), B

    def __add__(self, other: "FourierForm") -> "FourierForm":
        a, b, B = self._aligned(other)
        out = {m: v.copy() for m, v in a.comps.items()}
        for m, v in b.comps.items():
            out[m] = out[m] + v if m in out else v.copy()
        return FourierForm(self.torus, B, out, self.cap)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: complex) -> "FourierForm":
        return FourierForm(self.torus, self.band, {m: c * v for m, v in self.comps.items()}, self.cap)

    __rmul__ = lambda self, c: self.scale(c)  # noqa: E731

    def norm(self) -> float:
        return math.sqrt(sum(float(np.sum(np.abs(v) ** 2)) for v in self.comps.values()))

    # exterior algebra
    def wedge(self, other: "FourierForm", tol: float = 1e-12) -> "FourierForm":
        if self.torus != other.torus:
            raise ValueError("forms live on different tori")
        B = self.band + other.band
        out: Dict[int, np.ndarray] = {}
        for ma, a in self.comps.items():
            for mb, b in other.comps.items():
                s = mask_sign(ma, mb)
                if s == 0:
                    continue
                conv = _conv(a, b)
                m = ma | mb
                out[m] = out[m] + s * conv if m in out else s * conv
        res = FourierForm(self.torus, B, out, self.cap)
        if B > self.cap:
            res = res.truncated(self.cap, tol)
        return res

    def __xor__(self, other):
        return self.wedge(other)

    # differentials
    def _eigen(self, gen: int) -> np.ndarray:
        j, bar = divmod(gen, 2)
        tau = self.torus.taus[j]
        B = self.band
        k = np.arange(-B, B + 1)
        ks = k.reshape([-1 if a == 2 * j else 1 for a in range(self.torus.real_dim)])
        kt = k.reshape([-1 if a == 2 * j + 1 else 1 for a in range(self.torus.real_dim)])
        if bar:
            lam = math.pi * (ks * tau - kt) / tau.imag
        else:
            lam = math.pi * (kt - ks * np.conj(tau)) / tau.imag
        return np.broadcast_to(lam, self.shape)

    def _apply_gens(self, gens: Sequence[int]) -> "FourierForm":
        out: Dict[int, np.ndarray] = {}
        for g in gens:
            lam = self._eigen(g)
            gm = 1 << g
            for m, v in self.comps.items():
                s = mask_sign(gm, m)
                if s == 0:
                    continue
                nm = m | gm
                term = s * lam * v
                out[nm] = out[nm] + term if nm in out else term
        return FourierForm(self.torus, self.band, out, self.cap)

    def partial(self) -> "FourierForm":
        return self._apply_gens([2 * j for j in range(self.torus.n)])

    def partialbar(self) -> "FourierForm":
        return self._apply_gens([2 * j + 1 for j in range(self.torus.n)])

    def d(self) -> "FourierForm":
        return self.partial() + self.partialbar()

    def dC(self) -> "FourierForm":
        return self.partial() - self.partialbar()

    def apply_op(self, op: str) -> "FourierForm":
        if op == ID:
            return self
        if op == D:
            return self.partial()
        if op == DB:
            return self.partialbar()
        raise ValueError(op)

    # integration and evaluation
    def integrate(self) -> complex:
        top = self.torus.top_mask
        for m, v in self.comps.items():
            if m != top and np.any(v != 0):
                raise NotTopDegree(f"component dx_{m:b} is not of top degree")
        if top not in self.comps:
            return 0j
        return complex(self.comps[top][(self.band,) * self.torus.real_dim]) * self.torus.top_integral()

    def evaluate(self, mask: int, x: Sequence[float]) -> complex:
        """Coefficient of dx_mask at the real point x = (s_1, t_1, ...)."""
        arr = self.comps.get(mask)
        if arr is None:
            return 0j
        k = np.arange(-self.band, self.band + 1)
        val = arr
        for xi in x:
            val = np.tensordot(np.exp(2j * math.pi * k * xi), val, axes=([0], [0]))
        return complex(val)


def _conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size <= 64 or b.size <= 64:
        return convolve(a, b, mode="full", method="direct")
    return fftconvolve(a, b, mode="full")


def wedge_all(forms: Sequence[FourierForm]) -> FourierForm:
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


# ---------------------------------------------------------- application

def apply_termlist(ops: OperatorTermList, forms: Sequence[FourierForm]) -> FourierForm:
    """Evaluate an operator on forms, splitting them into homogeneous parts (multilinear)."""
    if len(forms) != ops.arity:
        raise ValueError(f"operator {ops.name} takes {ops.arity} forms, got {len(forms)}")
    parts = [sorted(f.homogeneous().items()) for f in forms]
    out = FourierForm.zero(forms[0].torus)
    for combo in itertools.product(*parts):
        degs = tuple(d for d, _ in combo)
        fs = [f for _, f in combo]
        for assign, c in ops.slot_terms(degs).items():
            term = wedge_all([f.apply_op(op) for f, op in zip(fs, assign)])
            out = out + term.scale(float(c))
    return out


def sym_apply(F: Callable[[Sequence[FourierForm]], FourierForm], forms: Sequence[FourierForm]) -> FourierForm:
    """Sym over all orderings of homogeneous forms, with the shifted sign rule."""
    degs = [f.degree() for f in forms]
    out = FourierForm.zero(forms[0].torus)
    for perm in itertools.permutations(range(len(forms))):
        s = sym_sign(perm, degs)
        out = out + F([forms[p] for p in perm]).scale(s)
    return out


def omega_direct(forms: Sequence[FourierForm]) -> FourierForm:
    """omega from its defining Sym formula (independent of the term-list route)."""
    m = len(forms) - 1

    def F(fs):
        acc = FourierForm.zero(fs[0].torus)
        for k in range(m + 1):
            factors = [fs[0]] + [f.partial() for f in fs[1:k + 1]] + [f.partialbar() for f in fs[k + 1:]]
            acc = acc + wedge_all(factors).scale((-1) ** k)
        return acc

    return sym_apply(F, forms).scale(1.0 / math.factorial(m + 1))


def d_omega_rhs(forms: Sequence[FourierForm]) -> FourierForm:
    """Right side of the d omega identity."""
    m = len(forms) - 1
    first = wedge_all([f.partial() for f in forms]).scale((-1) ** m)
    second = wedge_all([f.partialbar() for f in forms])
    if m == 0:
        return first + second
    om = expand_omega(m - 1)

    def F(fs):
        return fs[0].partial().partialbar().scale((-1) ** fs[0].degree()).wedge(apply_termlist(om, fs[1:]))

    third = sym_apply(F, forms).scale(1.0 / math.factorial(m))
    return first + second + third


def relative_residual(a: FourierForm, b: FourierForm) -> float:
    scale = max(a.norm(), b.norm(), 1e-300)
    return (a - b).norm() / scale


# ------------------------------------------------------ harmonic forms

def harmonic_generators(torus: Torus) -> Dict[str, FourierForm]:
    """Constant forms matching the exterior PD models: e_{2j+1} = dz_j, e_{2j+2} = (i/2Im tau_j) dzbar_j."""
    out = {}
    for j, tau in enumerate(torus.taus):
        out[f"e{2 * j + 1}"] = FourierForm.constant(torus, 1 << (2 * j), 1.0)
        out[f"e{2 * j + 2}"] = FourierForm.constant(torus, 1 << (2 * j + 1), 1j / (2 * tau.imag))
    return out


def harmonic_form(torus: Torus, label: str) -> FourierForm:
    """Harmonic representative of a class labelled like "e1e2" (a wedge of generators)."""
    gens = harmonic_generators(torus)
    if label in ("1", ""):
        return FourierForm.constant(torus, 0, 1.0)
    parts = ["e" + p for p in label.split("e") if p]
    return wedge_all([gens[p] for p in parts])


def volume_form(torus: Torus) -> FourierForm:
    out = FourierForm.constant(torus, 0, 1.0)
    for j, tau in enumerate(torus.taus):
        vol = FourierForm.constant(torus, (1 << (2 * j)) | (1 << (2 * j + 1)), 1j / (2 * tau.imag))
        out = out.wedge(vol)
    return out
