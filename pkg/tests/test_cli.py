from __future__ import annotations

import json

import pytest

from hodgecor import cli
from hodgecor.suites import SUITES, run_suite


@pytest.fixture(autouse=True)
def tmp_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("HODGECOR_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path


def run_main(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_trees_count(capsys):
    code, rep = run_main(capsys, "trees", "--legs", "5")
    assert code == 0
    assert rep["count"] == 5
    assert rep["schema_version"] == cli.SCHEMA_VERSION


def test_trees_too_few_legs_is_config_error(capsys):
    code, rep = run_main(capsys, "trees", "--legs", "2")
    assert code == 2 and rep["error"] == "ConfigError"


def test_algebra_check(capsys):
    code, rep = run_main(capsys, "algebra-check", "--model", "genus-2")
    assert code == 0
    assert rep["checks"]["delta_delta_zero"]


def test_unknown_model_exit_code(capsys):
    code, rep = run_main(capsys, "algebra-check", "--model", "no-such-model")
    assert code == 3 and rep["error"] == "ModelLoadError"


def test_bad_tau_exit_code(capsys):
    code, rep = run_main(capsys, "green", "check", "--tau", "0.5-1j")
    assert code == 2


def test_unknown_config_key(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"bogus": 1}))
    code, _ = run_main(capsys, "trees", "--config", str(p))
    assert code == 2


def test_config_file_with_override(tmp_path, capsys):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"legs": 4}))
    code, rep = run_main(capsys, "trees", "--config", str(p))
    assert rep["count"] == 2
    code, rep = run_main(capsys, "trees", "--config", str(p), "--legs", "6")
    assert rep["count"] == 14


def test_verify_delta2(capsys):
    code, rep = run_main(capsys, "verify", "--suite", "delta2", "--weight", "5", "--seed", "1", "--n", "20")
    assert code == 0 and rep["failures"] == []


def test_verify_functoriality_reports_failure(capsys):
    code, rep = run_main(capsys, "verify", "--suite", "functoriality")
    assert code == 1
    assert rep["payload"]["failures"][0]["morphism"] == "projection"


def test_green_build_then_check(capsys, tmp_cache):
    code, rep = run_main(capsys, "green", "build", "--truncation", "16")
    assert code == 0
    code, rep = run_main(capsys, "green", "check", "--truncation", "16")
    assert code == 0
    assert rep["cache"] is not None
    assert rep["weak_residual"] < 1e-8


def test_green_detects_corrupt_cache(capsys):
    code, rep = run_main(capsys, "green", "build", "--truncation", "8")
    side = json.loads(open(rep["sidecar"]).read())
    side["coeffs_sha256"] = "0" * 64
    open(rep["sidecar"], "w").write(json.dumps(side))
    code, rep = run_main(capsys, "green", "check", "--truncation", "8")
    assert code == 1


def test_correlate_filtered_word(capsys):
    code, rep = run_main(capsys, "correlate", "--word", "C(e1,e1,e1,e2)")
    assert code == 0
    assert rep["value"] == 0 and rep["reason"] == "degree-filter"


def test_correlate_needs_word(capsys):
    code, _ = run_main(capsys, "correlate")
    assert code == 2


def test_correlate_value(capsys):
    code, rep = run_main(capsys, "correlate", "--word", "C(e1,e2,e1,e2)", "--mu", "delta",
                         "--point", "0.1", "0.2", "--grid", "32")
    assert code == 0
    assert rep["abs_error"] >= 0 and len(rep["value"]) == 2


def test_class_writes_table(tmp_path, capsys):
    out = tmp_path / "table.json"
    code, rep = run_main(capsys, "class", "--model", "ab-surface", "--weight", "3", "-o", str(out))
    assert code == 0
    data = json.loads(out.read_text())
    assert data["model"] == "ab-surface"
    assert rep["delta_G"]["passes"]


@pytest.mark.parametrize("check", ["q2", "hamiltonian", "commute", "deform"])
def test_csfield_checks(capsys, check):
    model = "genus-2" if check in ("q2", "hamiltonian") else "ab-surface"
    lie = "mat2" if model == "genus-2" else "sl2"
    code, rep = run_main(capsys, "csfield", "--model", model, "--lie", lie, "--check", check)
    assert code == 0 and rep["ok"]


def test_mc_samples_accepts_float_notation():
    args = vars(cli._parser().parse_args(["class", "--mc-samples", "1e6"]))
    assert args["mc_samples"] == 1_000_000


def test_suite_registry():
    assert set(SUITES) == {"jacobi", "antisym", "delta2", "theta-hom", "iso-dims", "functoriality"}
    with pytest.raises(KeyError):
        run_suite("nope")


@pytest.mark.parametrize("name", ["jacobi", "antisym", "delta2", "theta-hom"])
def test_suites_small(name):
    rep = run_suite(name, "ab-surface", 4, seed=2, n=10)
    assert rep.ok and rep.checks >= 10
