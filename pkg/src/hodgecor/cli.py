"""Command-line front end: ``hodgecor <verb> [flags]``.

Every verb prints one JSON report carrying the schema version, the full run
configuration and its hash.  Exit codes: 0 ok, 1 failed check, 2 bad
configuration, 3 model could not be loaded.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

SCHEMA_VERSION = 1
VERBS = ("trees", "algebra-check", "verify", "green", "correlate", "class", "csfield")


class ConfigError(ValueError):
    pass


class CheckFailed(RuntimeError):
    def __init__(self, message: str, payload: Optional[dict] = None):
        super().__init__(message)
        self.payload = payload or {}


@dataclass
class RunConfig:
    model: str = "elliptic"
    tau: List[str] = field(default_factory=lambda: ["0.5+0.8660254037844386j"])
    mu: str = "volume"
    point: List[float] = field(default_factory=list)
    truncation: int = 64
    band: int = 4
    grid: int = 64
    mc_samples: int = 100_000
    seed: int = 7
    flavor: str = "omega"
    max_weight: int = 4
    threads: int = 1
    output: Optional[str] = None
    # verb-specific
    legs: int = 3
    suite: str = "delta2"
    n_samples: Optional[int] = None
    action: str = "check"
    word: Optional[str] = None
    force: bool = False
    lie: str = "sl2"
    check: str = "q2"
    table: Optional[str] = None
    reduced: bool = False

    def validate(self) -> None:
        if self.mu not in ("volume", "delta"):
            raise ConfigError(f"mu must be 'volume' or 'delta', got {self.mu!r}")
        if self.flavor not in ("omega", "xi", "eta"):
            raise ConfigError(f"unknown flavor {self.flavor!r}")
        for name in ("truncation", "band", "grid", "mc_samples", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.max_weight < 2:
            raise ConfigError("max_weight must be at least 2")
        try:
            self.taus()
        except ValueError as exc:
            raise ConfigError(f"cannot parse tau: {exc}") from exc
        if any(t.imag <= 0 for t in self.taus()):
            raise ConfigError("tau must lie in the upper half plane")

    def taus(self) -> Tuple[complex, ...]:
        return tuple(complex(t.replace(" ", "").replace("i", "j")) for t in self.tau)

    def to_json(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]


def load_config(path: Optional[str], overrides: Dict[str, object]) -> RunConfig:
    data: Dict[str, object] = {}
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**data)
    cfg.validate()
    return cfg


def cache_dir() -> Path:
    base = os.environ.get("HODGECOR_CACHE_DIR")
    p = Path(base) if base else Path.home() / ".cache" / "hodgecor"
    p.mkdir(parents=True, exist_ok=True)
    return p


# ---------------------------------------------------------------- helpers

def _model(cfg: RunConfig):
    from .pd_algebra import get_model
    return get_model(cfg.model)


def _engine_config(cfg: RunConfig, A):
    from .correlator_engine import EngineConfig
    taus = list(cfg.taus())
    if len(taus) == 1 and A.n == 2:
        taus = taus * 2
    if len(taus) != A.n:
        raise ConfigError(f"model {A.name} needs {A.n} tau values")
    return EngineConfig(taus=tuple((t.real, t.imag) for t in taus), mu=cfg.mu, point=tuple(cfg.point),
                        grid=cfg.grid, flavor=cfg.flavor, mc_samples=cfg.mc_samples, seed=cfg.seed)


def _torus(cfg: RunConfig):
    from .form_calculus import Torus
    return Torus(cfg.taus())


# ------------------------------------------------------------------ verbs

def verb_trees(cfg: RunConfig) -> dict:
    from .plane_trees import TooFewLegs, trees_json
    try:
        out = trees_json(cfg.legs)
    except TooFewLegs as exc:
        raise ConfigError(str(exc)) from exc
    out["count"] = len(out["trees"])
    return out


def verb_algebra_check(cfg: RunConfig) -> dict:
    from .cyclic_words import cohomology_alphabet, homology_alphabet
    from .free_lie import bracket, canonical_delta
    A = _model(cfg)  # validation (unit, associativity, graded commutativity) runs on load
    D = canonical_delta(A, homology_alphabet(A))
    checks = {
        "pairing_nondegenerate": True,
        "delta_delta_zero": bracket(A, D, D).is_zero(),
        "reduced_dim": len(A.reduced_indices()),
        "cohomology_letters": len(cohomology_alphabet(A).letters),
    }
    if not checks["delta_delta_zero"]:
        raise CheckFailed("{Delta,Delta} != 0", {"model": A.name})
    return {"model": A.name, "n": A.n, "dim": A.dim, "labels": A.labels(), "checks": checks}


def verb_verify(cfg: RunConfig) -> dict:
    from .suites import SUITES, run_suite
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {sorted(SUITES)}")
    weight = cfg.max_weight if cfg.suite != "functoriality" else None
    rep = run_suite(cfg.suite, cfg.model, weight, cfg.seed, cfg.n_samples).to_json()
    if rep["failures"]:
        raise CheckFailed(f"{len(rep['failures'])} failures in suite {cfg.suite}", rep)
    return rep


def _propagator_paths(P) -> Tuple[Path, Path]:
    key = hashlib.sha256(json.dumps(P.metadata(), sort_keys=True).encode()).hexdigest()[:16]
    base = cache_dir() / f"propagator-{key}"
    return base.with_suffix(".npy"), base.with_suffix(".json")


def _coeff_hash(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()


def verb_green(cfg: RunConfig) -> dict:
    from .green_kernels import UnsupportedDimension, build_propagator, weak_residual
    try:
        P = build_propagator(_torus(cfg), cfg.mu, cfg.point or None, cfg.truncation)
    except UnsupportedDimension as exc:
        raise ConfigError(str(exc)) from exc
    npy, side = _propagator_paths(P)
    if cfg.action == "build":
        np.save(npy, P.coeffs)
        side.write_text(json.dumps({**P.metadata(), "coeffs_sha256": _coeff_hash(P.coeffs),
                                    "shape": list(P.coeffs.shape)}, indent=1))
        return {"action": "build", "cache": str(npy), "sidecar": str(side), **P.metadata()}
    if cfg.action != "check":
        raise ConfigError("green takes 'build' or 'check'")
    cached = None
    if npy.exists() and side.exists():
        meta = json.loads(side.read_text())
        arr = np.load(npy)
        if meta.get("coeffs_sha256") != _coeff_hash(arr):
            raise CheckFailed("propagator cache does not match its sidecar hash", {"cache": str(npy)})
        P.coeffs = arr
        cached = str(npy)
    C = P.coeffs
    flipped = C[tuple(slice(None, None, -1) for _ in range(C.ndim))]
    sym = float(np.max(np.abs(C - flipped)))
    band = min(cfg.band, cfg.truncation)
    r = weak_residual(P, band)
    rep = {"action": "check", "cache": cached, "band": band, "weak_residual": r.max_abs,
           "num_tests": r.num_tests, "symmetry_defect": sym, **P.metadata()}
    if r.max_abs > 1e-8 or sym != 0.0:
        raise CheckFailed("green kernel check failed", rep)
    return rep


def verb_correlate(cfg: RunConfig) -> dict:
    from .correlator_engine import CorrelatorEngine, may_contribute
    from .cyclic_words import parse_word
    if not cfg.word:
        raise ConfigError("correlate needs --word, e.g. 'C(e1,e2,e1,e2)'")
    A = _model(cfg)
    try:
        w, _ = parse_word(A, cfg.word)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    ecfg = _engine_config(cfg, A)
    eng = CorrelatorEngine(A, ecfg)
    est = eng.correlator(w, force=cfg.force)
    out = {"word": cfg.word, "model": A.name, "engine_config": ecfg.to_json(),
           "engine_config_hash": ecfg.digest(), "may_contribute": may_contribute(w, A)}
    if est.reason:
        out.update({"value": 0, "abs_error": 0.0, "reason": est.reason})
    else:
        out.update({"value": [est.value.real, est.value.imag], "abs_error": est.error})
    return out


def verb_class(cfg: RunConfig) -> dict:
    from .correlator_engine import correlator_class, delta_residual
    A = _model(cfg)
    ecfg = _engine_config(cfg, A)
    cls = correlator_class(A, ecfg, cfg.max_weight)
    table = cls.table.to_json(A)
    path = Path(cfg.output) if cfg.output else cache_dir() / f"table-{A.name}-{ecfg.digest()}.json"
    path.write_text(json.dumps(table, indent=1))
    dG = delta_residual(A, cls)
    worst = max(((abs(v), dG.budget.get(w, 0.0)) for w, v in dG.residual.items()), default=(0.0, 0.0))
    passes = dG.passes(3.0, 5e-2)
    rep = {"model": A.name, "table": str(path), "entries": len(cls.table.entries),
           "class_terms": len(cls.G.terms), "delta_G": {"worst": worst[0], "budget_at_worst": worst[1],
                                                       "passes": passes}}
    if not passes:
        raise CheckFailed("delta G exceeds its error budget", rep)
    return rep


def verb_csfield(cfg: RunConfig) -> dict:
    from . import dg_scheme as dg
    from .correlator_engine import CorrelatorTable
    A = _model(cfg)
    try:
        g = dg.get_lie(cfg.lie)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    rep: Dict[str, object] = {"model": A.name, "lie": g.name, "check": cfg.check, "reduced": cfg.reduced}
    if cfg.check == "q2":
        Q = dg.chern_simons_field(g, A, cfg.reduced)
        ok = dg.square(Q).is_zero()
        rep.update({"coordinates": len(Q.coords), "Q_terms": sum(len(p) for p in Q.comps.values()),
                    "Q_squared_zero": ok})
    elif cfg.check == "hamiltonian":
        Q = dg.chern_simons_field(g, A, cfg.reduced)
        ok = (dg.cs_hamiltonian_field(A, g, cfg.reduced) - Q).is_zero()
        rep.update({"symplectic": dg.symplectic_checks(A, g, cfg.reduced), "hamiltonian_equals_Q": ok})
        ok = ok and all(rep["symplectic"].values())
    elif cfg.check in ("commute", "deform"):
        Q = dg.chern_simons_field(g, A, reduced=True)
        if cfg.table:
            try:
                data = json.loads(Path(cfg.table).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read table {cfg.table}: {exc}") from exc
            V = dg.hodge_field(CorrelatorTable.from_json(A, data), g, A)
            rep["source"] = cfg.table
        else:
            V = dg.hodge_field(dg.synthetic_closed_chain(A, cfg.seed), g, A)
            rep["source"] = "synthetic delta-exact chain"
        R = dg.commutator(Q, V) if cfg.check == "commute" else dg.deformation_square(Q, V)
        rep.update({"field_terms": sum(len(p) for p in V.comps.values()), "max_abs": float(R.max_abs())})
        ok = R.is_zero() if not cfg.table else R.max_abs() < 5e-2
    else:
        raise ConfigError("csfield --check takes q2, hamiltonian, commute or deform")
    rep["ok"] = bool(ok)
    if not ok:
        raise CheckFailed(f"csfield {cfg.check} failed", rep)
    return rep


HANDLERS = {
    "trees": verb_trees,
    "algebra-check": verb_algebra_check,
    "verify": verb_verify,
    "green": verb_green,
    "correlate": verb_correlate,
    "class": verb_class,
    "csfield": verb_csfield,
}


def run(verb: str, cfg: RunConfig) -> Tuple[int, dict]:
    """Run one verb; returns (exit code, JSON report)."""
    from .pd_algebra import ModelLoadError
    head = {"schema_version": SCHEMA_VERSION, "verb": verb, "config": cfg.to_json(),
            "config_hash": cfg.digest()}
    if verb not in HANDLERS:
        return 2, {**head, "error": "ConfigError", "message": f"unknown verb {verb!r}"}
    t0 = time.perf_counter()
    try:
        body = HANDLERS[verb](cfg)
        code, status = 0, "ok"
    except CheckFailed as exc:
        body, code, status = {"error": "CheckFailed", "message": str(exc), "payload": exc.payload}, 1, "failed"
    except ConfigError as exc:
        body, code, status = {"error": "ConfigError", "message": str(exc)}, 2, "error"
    except ModelLoadError as exc:
        body, code, status = {"error": "ModelLoadError", "message": str(exc)}, 3, "error"
    return code, {**head, "status": status, "seconds": round(time.perf_counter() - t0, 3), **body}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hodgecor", description="Hodge correlator toolkit")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("action", nargs="?", help="sub-action for green: build | check")
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--model")
    p.add_argument("--tau", action="append", help="modular parameter, repeat once per factor")
    p.add_argument("--mu", choices=["volume", "delta"])
    p.add_argument("--point", type=float, nargs="+")
    p.add_argument("--truncation", type=int)
    p.add_argument("--band", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--mc-samples", dest="mc_samples", type=lambda s: int(float(s)))
    p.add_argument("--seed", type=int)
    p.add_argument("--flavor", choices=["omega", "xi", "eta"])
    p.add_argument("--weight", "--max-weight", dest="max_weight", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--output", "-o")
    p.add_argument("--legs", type=int)
    p.add_argument("--suite")
    p.add_argument("--n", dest="n_samples", type=int)
    p.add_argument("--word")
    p.add_argument("--force", action="store_true", default=None)
    p.add_argument("--lie")
    p.add_argument("--check")
    p.add_argument("--table")
    p.add_argument("--reduced", action="store_true", default=None)
    p.add_argument("--json", action="store_true", help="accepted for compatibility; output is always JSON")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = vars(_parser().parse_args(argv))
    verb = args.pop("verb")
    config_path = args.pop("config")
    args.pop("json")
    action = args.pop("action")
    if action is not None:
        args["action"] = action
    try:
        cfg = load_config(config_path, args)
    except (ConfigError, TypeError) as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "verb": verb, "status": "error",
                          "error": "ConfigError", "message": str(exc)}))
        return 2
    code, report = run(verb, cfg)
    text = json.dumps(report, indent=1, default=_json_default)
    if cfg.output and verb != "class":
        Path(cfg.output).write_text(text)
    print(text)
    return code


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return str(x)


if __name__ == "__main__":
    sys.exit(main())
