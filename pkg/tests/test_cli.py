import csv
import io
import json
import os
import subprocess
import sys

import pytest

from career_lab.cli import build_config, build_parser, main

PATH_ARGS = ["--h1", "1", "--h-eps", "1", "--h-delta", "inf", "--beta", "0.5", "--cost", "power:1:2"]
STATIONARY = ["--h1", "0.6180339887498949", "--h-eps", "1", "--h-delta", "1", "--beta", "0.9"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv("CAREER_LAB_SEED", raising=False)


def test_path_example(capsys):
    code, out, _ = run(capsys, "path", *PATH_ARGS, "--T", "5")
    assert code == 0
    assert out.splitlines()[0] == "t,h_t,mu_t,gamma_t,a_star_t,terms_used,tail_bound"
    rows = rows_of(out)
    assert len(rows) == 5
    assert float(rows[0]["gamma_t"]) == pytest.approx(0.386294, abs=1e-6)
    assert rows[0]["gamma_t"] == "0.386294361062"


def test_path_single_row(capsys):
    code, out, _ = run(capsys, "path", *PATH_ARGS, "-T", "1")
    assert code == 0 and len(rows_of(out)) == 1


def test_path_divergent(capsys):
    code, _, err = run(capsys, "path", "--beta", "1", "--h-delta", "inf")
    assert code == 2
    assert "beta = 1" in err and "h_delta = inf" in err


def test_gamma_bound_on_emitted_paths(capsys):
    for beta in ("0.3", "0.9", "0.99"):
        code, out, _ = run(capsys, "path", "--beta", beta, "--h-delta", "2", "--h1", "0.1", "-T", "30")
        b = float(beta)
        assert code == 0
        assert all(0.0 <= float(r["gamma_t"]) <= b / (1 - b) + 1e-10 for r in rows_of(out))


def test_invalid_params_lists_every_error(capsys):
    code, _, err = run(capsys, "path", "--h1", "-1", "--beta", "2")
    assert code == 1
    assert "NonPositivePrecision" in err and "BetaOutOfRange" in err


def test_bad_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["path", "--no-such-flag"])
    assert exc.value.code == 1


def test_steady_example(capsys):
    code, out, _ = run(capsys, "steady", "--h-delta", "1", "--beta", "0.9")
    assert code == 0
    d = json.loads(out)
    assert d["mu_star"] == pytest.approx(0.381966, abs=1e-6)
    assert d["h_star"] == pytest.approx(0.618034, abs=1e-6)
    assert d["gamma"] == pytest.approx(0.847614, abs=1e-6)
    assert d["a_star"] == pytest.approx(0.847614, abs=1e-6)


def test_steady_edge_cases(capsys):
    code, out, _ = run(capsys, "steady", "--h-delta", "1", "--beta", "0")
    assert code == 0 and json.loads(out)["a_star"] == 0.0
    code, out, _ = run(capsys, "steady", "--h-delta", "1e6", "--cost", "flat_then_power:1:1:2")
    assert code == 0 and json.loads(out)["a_star"] == pytest.approx(1.0, abs=0.01)
    code, _, _ = run(capsys, "steady", "--h-delta", "inf")
    assert code == 1


def test_errata_persistent(capsys):
    code, out, _ = run(capsys, "errata", *PATH_ARGS, "-T", "20")
    assert code == 0
    rows = rows_of(out)
    for r in rows:
        assert float(r["diff_h10"]) == pytest.approx(1.0 / int(r["t"]), abs=1e-9)


def test_errata_stationary(capsys):
    code, out, _ = run(capsys, "errata", *STATIONARY, "-T", "5")
    assert code == 0
    for r in rows_of(out):
        assert r["gamma_h10"] == "" and r["diff_h10"] == ""
        assert float(r["ratio_h21"]) == pytest.approx(0.381966011, abs=1e-9)


def test_errata_guards(capsys):
    assert run(capsys, "errata", *STATIONARY, "--variants", "h10")[0] == 1
    assert run(capsys, "errata", *STATIONARY, "--variants", "h99")[0] == 1
    assert run(capsys, "errata", "--beta", "1", "--h-delta", "1")[0] == 1


def test_verify_small(capsys, tmp_path):
    out_file = tmp_path / "report.json"
    code, _, _ = run(capsys, "verify", "--n-reps", "20000", "--T", "4", "--master-seed", "42", "-o", str(out_file))
    report = json.loads(out_file.read_text())
    assert code == 0 and report["passed"]
    assert {c["name"] for c in report["checks"]} >= {"wage_consistency", "filter_calibration", "best_response"}


def test_verify_negative_control(capsys):
    code, out, err = run(capsys, "verify", "--n-reps", "20000", "--T", "4", "--master-seed", "42",
                         "--solver-variant", "h21")
    assert code == 3
    failed = {c["name"] for c in json.loads(out)["checks"] if not c["passed"]}
    assert "solver_vs_mu_form" in failed and "mc_deviation_slope" in failed
    assert "verification failed" in err


def test_verify_too_few_reps(capsys):
    code, _, err = run(capsys, "verify", "--n-reps", "10", "--T", "3")
    assert code == 1 and "TooFewReplications" in err


def test_sweep_r(capsys):
    code, out, _ = run(capsys, "sweep", "--var", "r", "--values", "1,0.1,0.01,0.001")
    assert code == 0
    a = [float(r["a_star"]) for r in rows_of(out)]
    assert len(a) == 4 and all(y < x for x, y in zip(a, a[1:]))


def test_sweep_mu1_with_svg(capsys, tmp_path):
    svg = tmp_path / "chart.svg"
    code, out, _ = run(capsys, "sweep", "--var", "mu1", "--h-delta", "1", "--grid", "0.01:0.99:99", "--svg", str(svg))
    assert code == 0
    g = [float(r["gamma"]) for r in rows_of(out)]
    assert len(g) == 99 and all(y < x for x, y in zip(g, g[1:]))
    text = svg.read_text()
    assert text.count("<polyline") == 1 and 'version="1.1"' in text


def test_sweep_beta(capsys):
    code, out, _ = run(capsys, "sweep", "--var", "beta", "--h-delta", "1", "--values", "0,0.5,1")
    assert code == 0
    rows = rows_of(out)
    assert float(rows[0]["a_star"]) == 0.0
    assert float(rows[-1]["gamma"]) == pytest.approx(1.0, abs=1e-12)


def test_sweep_edge_cases(capsys):
    code, out, _ = run(capsys, "sweep", "--var", "mu1", "--values", "")
    assert code == 0 and out == "mu1,gamma\n"
    assert run(capsys, "sweep", "--var", "h1", "--values", "1")[0] == 1
    assert run(capsys, "sweep", "--var", "r", "--values", "a,b")[0] == 1


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"beta": 0.7, "h_delta": 2, "master_seed": 5, "cost": {"type": "power", "c": 2, "p": 3}}))
    parser = build_parser()
    args = parser.parse_args(["path", "--config", str(cfg)])
    rc = build_config(args, env={})
    assert rc.params.beta == 0.7 and rc.params.h_delta == 2.0 and rc.master_seed == 5 and rc.cost.p == 3.0
    assert build_config(args, env={"CAREER_LAB_SEED": "9"}).master_seed == 9
    args = parser.parse_args(["path", "--config", str(cfg), "--beta", "0.1", "--master-seed", "11"])
    rc = build_config(args, env={"CAREER_LAB_SEED": "9"})
    assert rc.params.beta == 0.1 and rc.master_seed == 11


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert run(capsys, "path", "--config", str(bad))[0] == 1
    bad.write_text("{not json")
    assert run(capsys, "path", "--config", str(bad))[0] == 1
    assert run(capsys, "path", "--config", str(tmp_path / "missing.json"))[0] == 1


def test_subprocess_byte_identical(tmp_path):
    env = dict(os.environ, CAREER_LAB_SEED="3")
    cmd = [sys.executable, "-m", "career_lab", "path", *PATH_ARGS, "-T", "8"]
    a = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, env=env, check=True).stdout
    assert a == b and a.startswith(b"t,h_t,")
    bad = subprocess.run([sys.executable, "-m", "career_lab", "path", "--beta", "1"], capture_output=True)
    assert bad.returncode == 2
