"""Translation-invariant Green currents on flat tori E_tau_1 x ... x E_tau_n.

For the volume normalization the Green current on X x X is

    G(x, y) = g(x - y)                      (curves)
    G(x, y) = g(x - y) * s^*(w_1 + w_2)     (surfaces, n = 2)

with s(x, y) = x - y, w_j = (i / 2 Im tau_j) dz_j ^ dzbar_j and
g = sum_{k != 0} ghat(k) e(k . u), ghat(k) = -1 / lambda(k),
lambda(k) = sum_j pi |k_{t_j} - k_{s_j} tau_j|^2 / Im tau_j.

Pointwise values use an Ewald split of 1/lambda = int_0^inf exp(-s lambda) ds at
s = s0: the short part is a lattice sum in the coordinates
w_j = z_j / sqrt(Im tau_j), where the lattice has covolume one.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import exp1

from .form_calculus import Torus, mask_sign, popcount


class UnsupportedDimension(ValueError):
    pass


class OnDiagonal(ValueError):
    pass


# ------------------------------------------------------------ spectrum

def mode_grid(n_real: int, band: int) -> List[np.ndarray]:
    k = np.arange(-band, band + 1)
    return np.meshgrid(*([k] * n_real), indexing="ij")


def dz_eigen(tau: complex, ks, kt):
    """partial/partial z eigenvalue of e(ks s + kt t)."""
    return math.pi * (kt - ks * np.conj(tau)) / tau.imag


def dzbar_eigen(tau: complex, ks, kt):
    return math.pi * (ks * tau - kt) / tau.imag


def laplace_eigen(torus: Torus, grids: Sequence[np.ndarray]) -> np.ndarray:
    lam = 0.0
    for j, tau in enumerate(torus.taus):
        ks, kt = grids[2 * j], grids[2 * j + 1]
        lam = lam + math.pi * np.abs(kt - ks * tau) ** 2 / tau.imag
    return lam


def ghat(torus: Torus, band: int) -> np.ndarray:
    """Fourier coefficients of g on the mode box |k| <= band (zero mode 0)."""
    grids = mode_grid(torus.real_dim, band)
    lam = laplace_eigen(torus, grids)
    out = np.zeros(lam.shape)
    nz = lam > 0
    out[nz] = -1.0 / lam[nz]
    return out


# ------------------------------------------------------------ Propagator

@dataclass
class Propagator:
    torus: Torus
    mu_choice: str = "volume"
    point: Optional[Tuple[float, ...]] = None
    truncation: int = 64
    s0: float = 1.0
    symmetrized: bool = True
    coeffs: np.ndarray = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.torus.n

    @property
    def singular_model(self) -> dict:
        if self.n == 1:
            return {"kind": "log", "coefficient": 1.0, "variable": "|x-y|^2"}
        return {"kind": "inverse-square", "coefficient": -1.0 / math.pi,
                "variable": "sum_j |z_j|^2 / Im tau_j"}

    def fourier_coeff(self, k: Sequence[int]) -> float:
        B = self.truncation
        if max(abs(x) for x in k) > B:
            return 0.0
        return float(self.coeffs[tuple(B + x for x in k)])

    def table(self, band: int) -> np.ndarray:
        B = self.truncation
        if band > B:
            raise ValueError("requested band exceeds truncation")
        sl = tuple(slice(B - band, B + band + 1) for _ in range(self.torus.real_dim))
        return self.coeffs[sl]

    def metadata(self) -> dict:
        return {"taus": [[t.real, t.imag] for t in self.torus.taus], "mu": self.mu_choice,
                "point": list(self.point) if self.point is not None else None,
                "truncation": self.truncation, "s0": self.s0}


def build_propagator(torus: Torus, mu_choice: str = "volume", point: Optional[Sequence[float]] = None,
                     truncation: int = 64, s0: float = 1.0) -> Propagator:
    if torus.n not in (1, 2):
        raise UnsupportedDimension(f"complex dimension {torus.n} is not shipped")
    if mu_choice not in ("volume", "delta"):
        raise ValueError("mu_choice must be 'volume' or 'delta'")
    if mu_choice == "delta":
        point = tuple(point) if point is not None else (0.0,) * torus.real_dim
    return Propagator(torus, mu_choice, tuple(point) if point is not None else None, truncation, s0,
                      True, ghat(torus, truncation))


# ------------------------------------------------------------ evaluation

def _wrap(u: Sequence[float]) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u - np.round(u)


def _w_coords(torus: Torus, u: np.ndarray) -> np.ndarray:
    """Complex coordinates w_j = (s_j + tau_j t_j) / sqrt(Im tau_j)."""
    return np.array([(u[2 * j] + tau * u[2 * j + 1]) / math.sqrt(tau.imag) for j, tau in enumerate(torus.taus)])


def _image_range(torus: Torus, s0: float, tol: float = 1e-16) -> int:
    # smallest lattice vector in w coordinates bounds the Gaussian decay
    minlen = min(min(1.0, abs(tau)) / math.sqrt(tau.imag) for tau in torus.taus)
    minlen = min(minlen, min(tau.imag / math.sqrt(tau.imag) for tau in torus.taus))
    R = math.sqrt(max(-math.log(tol), 1.0) * s0 / math.pi) / minlen
    return int(math.ceil(R)) + 1


def _mode_range(torus: Torus, s0: float, tol: float = 1e-16) -> int:
    # lambda(k) >= pi * c |k|^2 for a lattice-dependent constant c
    c = min(min(1.0, tau.imag ** 2) / (tau.imag * (1 + abs(tau)) ** 2) for tau in torus.taus)
    K = math.sqrt(max(-math.log(tol), 1.0) / (s0 * math.pi * c))
    return int(math.ceil(K)) + 1


@dataclass
class GreenValue:
    value: complex
    error: float


def g_value(torus: Torus, u: Sequence[float], deriv: str = "id", s0: float = 1.0,
            images: Optional[int] = None, modes: Optional[int] = None) -> GreenValue:
    """g(u) or a first derivative; deriv in {"id", "dz1", "dzb1", "dz2", "dzb2"}."""
    n = torus.n
    u = _wrap(u)
    images = images if images is not None else min(_image_range(torus, s0), 8)
    modes = modes if modes is not None else min(_mode_range(torus, s0), 24)
    # long-range part
    grids = mode_grid(torus.real_dim, modes)
    lam = laplace_eigen(torus, grids)
    phase = np.exp(2j * math.pi * sum(g * x for g, x in zip(grids, u)))
    mult = np.ones_like(lam, dtype=complex)
    if deriv != "id":
        j = int(deriv[-1]) - 1
        tau = torus.taus[j]
        ks, kt = grids[2 * j], grids[2 * j + 1]
        mult = dzbar_eigen(tau, ks, kt) if deriv.startswith("dzb") else dz_eigen(tau, ks, kt)
    nz = lam > 0
    coef = np.zeros_like(lam)
    coef[nz] = -np.exp(-s0 * lam[nz]) / lam[nz]
    terms = coef * mult * phase
    long_part = complex(np.sum(terms))
    shell = np.max(np.abs(np.stack(grids)), axis=0) == modes
    long_tail = float(np.sum(np.abs(terms[shell])))
    # short-range part: lattice images in w coordinates
    short = 0j
    sqrt_im = [math.sqrt(t.imag) for t in torus.taus]
    rng = range(-images, images + 1)
    short_tail = 0.0
    for shift in itertools.product(rng, repeat=torus.real_dim):
        v = u + np.array(shift, dtype=float)
        zs = [v[2 * j] + tau * v[2 * j + 1] for j, tau in enumerate(torus.taus)]
        r2 = sum(abs(z) ** 2 / si ** 2 for z, si in zip(zs, sqrt_im))
        if r2 == 0.0:
            raise OnDiagonal("g is singular on the diagonal")
        a = math.pi * r2 / s0
        before = short
        if deriv == "id":
            if n == 1:
                short -= exp1(a)
            else:
                short -= math.exp(-a) / (math.pi * r2)
        else:
            j = int(deriv[-1]) - 1
            zj = zs[j]
            # d r2 / dz_j = conj(z_j) / Im tau_j ; d r2 / dzbar_j = z_j / Im tau_j
            dr2 = (zj if deriv.startswith("dzb") else zj.conjugate()) / torus.taus[j].imag
            if n == 1:
                # d/dr2 [-E1(pi r2 / s0)] = exp(-a) / r2
                short += math.exp(-a) / r2 * dr2
            else:
                # d/dr2 [-exp(-a)/(pi r2)] = exp(-a) (1/(pi r2^2) + 1/(s0 r2))
                short += math.exp(-a) * (1.0 / (math.pi * r2 * r2) + 1.0 / (s0 * r2)) * dr2
        if max(abs(x) for x in shift) == images:
            short_tail += abs(short - before)
    const = s0 if deriv == "id" else 0.0
    value = const + short + long_part
    # the outermost shells dominate the omitted tails (Gaussian decay)
    err = long_tail + short_tail + 1e-15 * abs(value)
    return GreenValue(value, float(err))


def g_slow(torus: Torus, u: Sequence[float], band: int, deriv: str = "id") -> complex:
    """Direct (slowly converging) truncated Fourier sum of g, for cross-checks."""
    grids = mode_grid(torus.real_dim, band)
    lam = laplace_eigen(torus, grids)
    phase = np.exp(2j * math.pi * sum(g * x for g, x in zip(grids, _wrap(u))))
    mult = 1.0
    if deriv != "id":
        j = int(deriv[-1]) - 1
        tau = torus.taus[j]
        ks, kt = grids[2 * j], grids[2 * j + 1]
        mult = dzbar_eigen(tau, ks, kt) if deriv.startswith("dzb") else dz_eigen(tau, ks, kt)
    nz = lam > 0
    coef = np.zeros_like(lam)
    coef[nz] = -1.0 / lam[nz]
    return complex(np.sum(coef * mult * phase))


def eval_green(P: Propagator, x: Sequence[float], y: Sequence[float], deriv: str = "id") -> GreenValue:
    """Scalar part of G(x, y) (the coefficient function multiplying s^*(w_1 + w_2) on surfaces).

    deriv acts on the x variable: "dz1" means partial/partial z_1(x).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.allclose(_wrap(x - y), 0.0):
        raise OnDiagonal("x = y")
    v = g_value(P.torus, x - y, deriv, P.s0)
    if P.mu_choice == "delta":
        a = np.asarray(P.point)
        vx = g_value(P.torus, x - a, deriv, P.s0)
        val = v.value - vx.value
        err = v.error + vx.error
        if deriv == "id":
            vy = g_value(P.torus, y - a, "id", P.s0)
            val -= vy.value
            err += vy.error
        return GreenValue(val, err)
    return v


# ------------------------------------------------------- weak residuals

def product_torus(torus: Torus) -> Torus:
    return Torus(tuple(torus.taus) + tuple(torus.taus))


def _gens(torus: Torus, factor: int) -> Tuple[List[int], List[int]]:
    """Generator indices (dz, dzbar) of the given factor inside X x X."""
    n = torus.n
    dz = [2 * (factor * n + j) for j in range(n)]
    dzb = [2 * (factor * n + j) + 1 for j in range(n)]
    return dz, dzb


ConstForm = Dict[int, complex]


def cw(a: ConstForm, b: ConstForm) -> ConstForm:
    out: ConstForm = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            s = mask_sign(ma, mb)
            if s:
                out[ma | mb] = out.get(ma | mb, 0) + s * ca * cb
    return {m: c for m, c in out.items() if c != 0}


def cadd(*xs: ConstForm) -> ConstForm:
    out: ConstForm = {}
    for x in xs:
        for m, c in x.items():
            out[m] = out.get(m, 0) + c
    return {m: c for m, c in out.items() if c != 0}


def cscale(x: ConstForm, s: complex) -> ConstForm:
    return {m: s * c for m, c in x.items()}


def gen(i: int) -> ConstForm:
    return {1 << i: 1.0}


def diagonal_normal_form(torus: Torus) -> ConstForm:
    """D0 = prod_j (i / 2 Im tau_j)(dz_j^x - dz_j^y) ^ (dzbar_j^x - dzbar_j^y): zero mode of delta_Diagonal."""
    dzx, dzbx = _gens(torus, 0)
    dzy, dzby = _gens(torus, 1)
    out: ConstForm = {0: 1.0}
    for j, tau in enumerate(torus.taus):
        a = cadd(gen(dzx[j]), cscale(gen(dzy[j]), -1))
        b = cadd(gen(dzbx[j]), cscale(gen(dzby[j]), -1))
        out = cw(out, cscale(cw(a, b), 1j / (2 * tau.imag)))
    return out


def green_form_part(torus: Torus) -> ConstForm:
    """Constant form multiplying g(x - y): 1 on curves, s^*(w_1 + ... ) on surfaces."""
    if torus.n == 1:
        return {0: 1.0}
    dzx, dzbx = _gens(torus, 0)
    dzy, dzby = _gens(torus, 1)
    out: ConstForm = {}
    for j, tau in enumerate(torus.taus):
        a = cadd(gen(dzx[j]), cscale(gen(dzy[j]), -1))
        b = cadd(gen(dzbx[j]), cscale(gen(dzby[j]), -1))
        out = cadd(out, cscale(cw(a, b), 1j / (2 * tau.imag)))
    return out


def integrate_const(torus2: Torus, f: ConstForm) -> complex:
    return f.get(torus2.top_mask, 0) * torus2.top_integral()


def restrict_diagonal_const(torus: Torus, f: ConstForm) -> ConstForm:
    """Pull back a constant form on X x X along the diagonal X -> X x X."""
    n = torus.n
    out: ConstForm = {}
    for m, c in f.items():
        # each generator of X x X maps to the same-named generator of X
        res: ConstForm = {0: c}
        for i in range(4 * n):
            if m >> i & 1:
                res = cw(res, gen(i % (2 * n)))
        out = cadd(out, res)
    return out


def harmonic_projector(torus: Torus, A=None) -> ConstForm:
    """p1^* mu + p2^* mu + sum_k p1^* a_k^vee ^ p2^* a_k built from the PD model basis."""
    from .form_calculus import harmonic_form
    from .pd_algebra import abelian_surface, elliptic
    if A is None:
        A = elliptic() if torus.n == 1 else abelian_surface()
    n = torus.n

    def const_of(label: str, factor: int) -> ConstForm:
        f = harmonic_form(torus, label)
        out: ConstForm = {}
        for m, arr in f.comps.items():
            c = complex(arr.flat[arr.size // 2])
            if c == 0:
                continue
            mm = m << (2 * n * factor)
            out[mm] = out.get(mm, 0) + c
        return out

    dual = A.dual_basis()
    total: ConstForm = {}
    for i, b in enumerate(A.basis):
        # dual[i] is a vector over the basis with trace(dual[i] * b_j) = delta_ij
        dv: ConstForm = {}
        for j, c in dual[i].items():
            dv = cadd(dv, cscale(const_of(A.basis[j].label, 0), complex(c)))
        total = cadd(total, cw(dv, const_of(b.label, 1)))
    return total


@dataclass
class WeakResidual:
    max_abs: float
    worst: tuple
    num_tests: int


def weak_residual(P: Propagator, band: int = 4, A=None) -> WeakResidual:
    """Max over band-limited basis test forms phi of |<(2 pi i)^{-1} dbar d G - RHS, phi>|.

    Test forms are e(a.x + b.y) dX_J with |a|, |b| <= band and J of complementary
    degree; the pairing uses int dbar d G ^ phi = int G ^ dbar d phi.
    """
    torus = P.torus
    T2 = product_torus(torus)
    n = torus.n
    N4 = 4 * n
    deg = 2 * n  # degree of test forms (complementary to the 2n-current)
    masks = [m for m in range(1 << N4) if popcount(m) == deg]
    dzx, dzbx = _gens(torus, 0)
    dzy, dzby = _gens(torus, 1)
    Gform = green_form_part(torus)
    Phar = harmonic_projector(torus, A)
    grids = mode_grid(torus.real_dim, band)
    shape = grids[0].shape
    ghat_a = ghat(torus, band)  # ghat is even, so ghat(-a) = ghat(a)
    worst = (0.0, None)
    count = 0

    # eigen multipliers of e(k.u), u = x - y, for k = -a
    lam_dz = [dz_eigen(tau, -grids[2 * j], -grids[2 * j + 1]) for j, tau in enumerate(torus.taus)]
    lam_dzb = [dzbar_eigen(tau, -grids[2 * j], -grids[2 * j + 1]) for j, tau in enumerate(torus.taus)]

    # constant tables c[(l, j)][J] = int dzbar^l_u ^ dz^j_u ^ Gform ^ dX_J
    du = [cadd(gen(dzx[j]), cscale(gen(dzy[j]), -1)) for j in range(n)]
    dub = [cadd(gen(dzbx[j]), cscale(gen(dzby[j]), -1)) for j in range(n)]
    mid = {(l, j): cw(cw(dub[l], du[j]), Gform) for l in range(n) for j in range(n)}

    zero = tuple(band for _ in range(torus.real_dim))
    for J in masks:
        phiJ = {J: 1.0}
        # (2 pi i)^{-1} int G ^ dbar d phi with phi's mode a on x and -a on y:
        # moving dbar d from phi to G gives the same multiplier applied to e(k.u), k = -a
        lhs = np.zeros(shape, dtype=complex)
        for (l, j), f in mid.items():
            c = integrate_const(T2, cw(f, phiJ))
            if c != 0:
                lhs = lhs + c * lam_dzb[l] * lam_dz[j]
        lhs = lhs * ghat_a / (2j * math.pi)
        # delta_Diagonal: int_Diag phi, mode a + b = 0 only; mode-independent constant
        diag = restrict_diagonal_const(torus, phiJ)
        rhs_diag = diag.get(torus.top_mask, 0) * torus.top_integral()
        # harmonic part: only the zero mode
        rhs_har = integrate_const(T2, cw(Phar, phiJ))
        res = lhs - rhs_diag
        res[zero] += rhs_har
        count += res.size
        k = int(np.argmax(np.abs(res)))
        if abs(res.flat[k]) > worst[0]:
            worst = (float(abs(res.flat[k])), (J, np.unravel_index(k, shape)))
    # modes with b != -a pair to zero on both sides: G, delta_Diag and P_Har only
    # have (k, -k) modes
    if P.mu_choice == "delta":
        r = _delta_point_residual(P, band, A)
        if r.max_abs > worst[0]:
            worst = (r.max_abs, r.worst)
        count += r.num_tests
    return WeakResidual(worst[0], worst[1], count)


def _delta_point_residual(P: Propagator, band: int, A=None) -> WeakResidual:
    """Residual of the single-variable pieces: (2 pi i)^{-1} dbar d h = delta_a - mu on X.

    With G_a = G - p1^* h(x - a) - p2^* h(y - a), the delta-point equation is the
    volume equation plus this single-variable equation on each factor.
    """
    torus = P.torus
    n = torus.n
    a_pt = np.asarray(P.point)
    grids = mode_grid(torus.real_dim, band)
    shape = grids[0].shape
    gh = ghat(torus, band)
    # form part of h on X: 1 on curves, (w_1 + ... ) on surfaces
    if n == 1:
        hform: ConstForm = {0: 1.0}
    else:
        hform = {}
        for j, tau in enumerate(torus.taus):
            hform = cadd(hform, cscale(cw(gen(2 * j), gen(2 * j + 1)), 1j / (2 * tau.imag)))
    vol: ConstForm = {0: 1.0}
    for j, tau in enumerate(torus.taus):
        vol = cw(vol, cscale(cw(gen(2 * j), gen(2 * j + 1)), 1j / (2 * tau.imag)))
    masks = [0]  # the equation is between top-degree currents on X
    worst = (0.0, None)
    count = 0
    # test form e(c.x) dx_J on X; h = sum_k ghat(k) e(-k.a) e(k.x), pairing selects k = -c
    lam_dz = [dz_eigen(tau, -grids[2 * j], -grids[2 * j + 1]) for j, tau in enumerate(torus.taus)]
    lam_dzb = [dzbar_eigen(tau, -grids[2 * j], -grids[2 * j + 1]) for j, tau in enumerate(torus.taus)]
    phase_h = np.exp(2j * math.pi * sum(g * x for g, x in zip(grids, a_pt)))  # e(-k.a), k = -c
    phase_delta = phase_h  # e(c.a)
    zero = tuple(band for _ in range(torus.real_dim))
    for J in masks:
        lhs = np.zeros(shape, dtype=complex)
        for l in range(n):
            for j in range(n):
                f = cw(cw(cw(gen(2 * l + 1), gen(2 * j)), hform), {J: 1.0})
                c = f.get(torus.top_mask, 0) * torus.top_integral()
                if c != 0:
                    lhs = lhs + c * lam_dzb[l] * lam_dz[j]
        lhs = lhs * gh * phase_h / (2j * math.pi)
        vJ = cw(vol, {J: 1.0}).get(torus.top_mask, 0) * torus.top_integral()
        # delta_a pairs with e(c.x) dx_J as e(c.a) times the volume coefficient
        res = lhs - vJ * phase_delta
        res[zero] += vJ
        count += res.size
        k = int(np.argmax(np.abs(res)))
        if abs(res.flat[k]) > worst[0]:
            worst = (float(abs(res.flat[k])), ("point", J, np.unravel_index(k, shape)))
    return WeakResidual(worst[0], worst[1], count)


def harmonic_orthogonality(P: Propagator) -> float:
    """|<G, p1^* a ^ p2^* b>| for constant test forms: the zero mode of g vanishes."""
    B = P.truncation
    return float(abs(P.coeffs[(B,) * P.torus.real_dim]))


# ------------------------------------------------------ batched values

def _ewald_terms(torus: Torus, s0: float, tol: float):
    """Mode and image sets whose Ewald terms exceed ``tol``."""
    K = min(_mode_range(torus, s0, tol), 12)
    grids = mode_grid(torus.real_dim, K)
    lam = laplace_eigen(torus, grids)
    keep = (lam > 0) & (np.exp(-s0 * lam) / np.where(lam > 0, lam, 1.0) > tol)
    modes = np.stack([g[keep] for g in grids], axis=1).astype(float)
    R = min(_image_range(torus, s0, tol), 6)
    shifts = np.array(list(itertools.product(range(-R, R + 1), repeat=torus.real_dim)), dtype=float)
    # drop images that stay beyond the Gaussian cutoff for every wrapped u
    corners = np.array(list(itertools.product((-0.5, 0.5), repeat=torus.real_dim)))
    half = math.sqrt(max(_w_norm2(torus, c) for c in corners))
    dist = np.sqrt(np.array([_w_norm2(torus, s) for s in shifts]))
    cut = math.sqrt(max(-math.log(tol), 1.0) * s0 / math.pi)
    shifts = shifts[dist - half < cut]
    return modes, lam[keep], shifts


def _w_norm2(torus: Torus, v: Sequence[float]) -> float:
    return sum(abs(v[2 * j] + tau * v[2 * j + 1]) ** 2 / tau.imag for j, tau in enumerate(torus.taus))


def g_batch(torus: Torus, U: np.ndarray, deriv: str = "id", s0: float = 1.0, tol: float = 1e-9,
            chunk: int = 4096) -> np.ndarray:
    """Vectorized g(u) (or a first derivative) for rows u of U; tolerance ``tol`` per tail."""
    U = _wrap(np.atleast_2d(U))
    n = torus.n
    modes, lam, shifts = _ewald_terms(torus, s0, tol)
    mult = np.ones(len(lam), dtype=complex)
    j = None
    if deriv != "id":
        j = int(deriv[-1]) - 1
        tau = torus.taus[j]
        ks, kt = modes[:, 2 * j], modes[:, 2 * j + 1]
        mult = dzbar_eigen(tau, ks, kt) if deriv.startswith("dzb") else dz_eigen(tau, ks, kt)
    coef = -np.exp(-s0 * lam) / lam * mult
    out = np.empty(len(U), dtype=complex)
    ims = np.array([t.imag for t in torus.taus])
    taus = np.array(torus.taus)
    for lo in range(0, len(U), chunk):
        u = U[lo:lo + chunk]
        long_part = np.exp(2j * math.pi * (u @ modes.T)) @ coef
        # images near the origin: minimal-image shifts only matter within the cutoff
        v = u[:, None, :] + shifts[None, :, :]
        z = v[:, :, 0::2] + taus[None, None, :] * v[:, :, 1::2]
        r2 = np.sum(np.abs(z) ** 2 / ims, axis=2)
        a = math.pi * r2 / s0
        if deriv == "id":
            if n == 1:
                short = -np.sum(exp1(np.maximum(a, 1e-300)), axis=1)
            else:
                short = -np.sum(np.exp(-a) / (math.pi * r2), axis=1)
            const = s0
        else:
            zj = z[:, :, j]
            dr2 = (zj if deriv.startswith("dzb") else np.conj(zj)) / torus.taus[j].imag
            if n == 1:
                short = np.sum(np.exp(-a) / r2 * dr2, axis=1)
            else:
                short = np.sum(np.exp(-a) * (1.0 / (math.pi * r2 * r2) + 1.0 / (s0 * r2)) * dr2, axis=1)
            const = 0.0
        out[lo:lo + chunk] = const + short + long_part
    return out
