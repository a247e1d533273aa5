import csv
import io
import json
import subprocess
import sys

import pytest

from cavitylab import cli

EPS = 0.70710678


def run(tmp_path, command, config, *extra, raw=None):
    path = tmp_path / "config.json"
    path.write_text(raw if raw is not None else json.dumps(config))
    return cli.main([command, "--config", str(path), *extra])


def test_steady_analytic(tmp_path, capsys):
    code = run(tmp_path, "steady", {"g": 1, "kappa": 2, "epsilon": EPS, "engines": ["analytic"]})
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["engines"]["analytic"]["commutator_expectation"] == pytest.approx(1.5, abs=1e-8)
    assert out["regime"] == "DrivenCoupled"
    assert list(out["engines"]) == ["analytic"]


def test_steady_oracle(tmp_path, capsys):
    code = run(tmp_path, "steady", {"g": 1, "kappa": 2, "epsilon": EPS, "n_max": 16, "engines": ["oracle"]})
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["engines"]["oracle"]["commutator_expectation"] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize(
    "raw,config",
    [
        ("{not json", None),
        (None, {"g": 1, "kappa": 0, "epsilon": 1}),
        (None, {"g": 1, "kappa": 2, "epsilon": 1, "typo": 3}),
        (None, {"g": 1, "kappa": 2, "epsilon": 1, "engines": ["exact"]}),
        (None, {"g": 1, "kappa": 2}),
    ],
)
def test_steady_config_errors(tmp_path, capsys, raw, config):
    assert run(tmp_path, "steady", config, raw=raw) == cli.EXIT_CONFIG
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "error" in captured.err


def test_steady_truncation_error(tmp_path, capsys):
    code = run(tmp_path, "steady", {"g": 0, "kappa": 2, "epsilon": 3, "n_max": 10, "engines": ["oracle"]})
    assert code == cli.EXIT_TRUNCATION
    assert capsys.readouterr().out == ""


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["steady", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG


def test_sweep_epsilon(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = {"g": 1, "kappa": 2, "epsilon": 0, "axis": "epsilon", "values": [0, EPS], "engines": ["analytic"]}
    assert run(tmp_path, "sweep", cfg, "--out", str(out)) == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == list(cli.CSV_HEADER)
    assert [float(r["commutator"]) for r in rows] == pytest.approx([2.0, 1.5], abs=1e-8)
    assert [r["axis_value"] for r in rows] == ["0", "0.70710678"]


def test_sweep_decoupled_columns(tmp_path, capsys):
    cfg = {"g": 1, "kappa": 2, "epsilon": 1, "axis": "g", "values": [0], "engines": ["analytic", "moments"]}
    assert run(tmp_path, "sweep", cfg) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 2
    for r in rows:
        assert r["eta_a"] == r["eta_b"] == r["sigma_re"] == "decoupled"
        assert float(r["nbar"]) == pytest.approx(1.0)
    assert rows[1]["converged"] == "true"


def test_sweep_discrepancy_rows(tmp_path, capsys):
    cfg = {"g": 1, "kappa": 2, "epsilon": 0, "axis": "epsilon", "values": [0], "n_max": 8,
           "engines": ["oracle", "analytic"]}
    assert run(tmp_path, "sweep", cfg) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["engine"] for r in rows] == ["analytic", "oracle", "oracle-analytic"]
    assert float(rows[2]["commutator"]) == pytest.approx(-1.0, abs=1e-9)


@pytest.mark.parametrize(
    "patch",
    [{"values": []}, {"values": [1, 0.5]}, {"values": [0.1, 0.1]}, {"axis": "beta"}, {"values": [-1, 1]},
     {"values": "0,1"}],
)
def test_sweep_invalid(tmp_path, patch):
    cfg = {"g": 1, "kappa": 2, "epsilon": 1, "axis": "epsilon", "values": [0, 1], **patch}
    out = tmp_path / "bad.csv"
    assert run(tmp_path, "sweep", cfg, "--out", str(out)) == cli.EXIT_CONFIG
    assert not out.exists()
    assert list(tmp_path.glob(".bad.csv.*")) == []


def test_sweep_threads_same_bytes(tmp_path, monkeypatch):
    cfg = {"g": 1, "kappa": 2, "epsilon": 0, "axis": "epsilon", "values": [0, 0.3, EPS, 1.0],
           "engines": ["analytic", "moments"]}
    serial, threaded = tmp_path / "s.csv", tmp_path / "t.csv"
    assert run(tmp_path, "sweep", cfg, "--out", str(serial)) == 0
    monkeypatch.setenv("CAVITYLAB_THREADS", "3")
    assert run(tmp_path, "sweep", cfg, "--out", str(threaded)) == 0
    assert serial.read_bytes() == threaded.read_bytes()


def test_sweep_float_format():
    assert cli._fmt(1 / 3) == "0.333333333333"
    assert cli._fmt(-0.0) == "0"
    assert cli._fmt(None) == ""
    assert cli._fmt(True) == "true"


@pytest.mark.parametrize(
    "g,eps,analytic_comm",
    [(1, EPS, 1.5), (1, 0, 2.0), (0, 1, 1.0)],
)
def test_compare(tmp_path, capsys, g, eps, analytic_comm):
    assert run(tmp_path, "compare", {"g": g, "kappa": 2, "epsilon": eps, "n_max": 16}) == 0
    out = json.loads(capsys.readouterr().out)
    eng = out["engines"]
    assert eng["analytic"]["commutator_expectation"] == pytest.approx(analytic_comm, abs=1e-7)
    assert eng["moments"]["commutator_expectation"] == pytest.approx(analytic_comm, abs=1e-6)
    assert eng["oracle"]["commutator_expectation"] == pytest.approx(1.0, abs=1e-6)
    assert out["flags"]["oracle_commutator_is_one"]
    assert out["flags"]["paper_vs_exact_gap"] is (g > 0)
    if g == 0:
        for e in eng.values():
            assert e["nbar"] == pytest.approx(1.0, abs=1e-8)


def test_compare_table(tmp_path, capsys):
    assert run(tmp_path, "compare", {"g": 1, "kappa": 2, "epsilon": 0, "n_max": 8}, "--table") == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0].split() == ["quantity", "analytic", "moments", "oracle"]
    assert "commutator_expectation" in text


def test_noise_check_pass(tmp_path, capsys):
    assert run(tmp_path, "noise-check", {"g": 0, "kappa": 2, "epsilon": 0}, "--seed", "3") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["pass"] and out["target"] == 1.0
    assert abs(out["ito"]["estimate"]) < 0.2 and abs(out["endpoint"]["estimate"] - 2) < 0.2


def test_noise_check_zero_trials(tmp_path):
    assert run(tmp_path, "noise-check", {"g": 0, "kappa": 2, "epsilon": 0, "trials": 0}) == cli.EXIT_CONFIG


def test_noise_check_failure_exit(tmp_path, monkeypatch, capsys):
    from cavitylab.stochastic import CorrelationEstimate

    monkeypatch.setattr(cli, "estimate_correlation", lambda *a, **k: CorrelationEstimate(0.0, 0.01, 0, 0, 0, 0))
    assert run(tmp_path, "noise-check", {"g": 0, "kappa": 2, "epsilon": 0}) == cli.EXIT_NOISE_FAIL
    assert "noise-check" in capsys.readouterr().err


def test_superpose_defaults(tmp_path, capsys):
    assert run(tmp_path, "superpose", {}) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["commutator_identity_exact"] and out["pass"]
    cases = {c["label"]: c for c in out["cases"]}
    assert cases["equal_real"]["formula_additive"] and cases["equal_real"]["matrix_additive"]
    assert cases["one_and_i"]["formula_cross_term"] == -2
    assert not cases["one_and_i"]["matrix_additive"]


def test_superpose_with_interacting_mode(tmp_path, capsys):
    assert run(tmp_path, "superpose", {"g": 1, "kappa": 2, "epsilon": EPS}) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["formula_commutator_sum"] == pytest.approx(2.5)


def test_superpose_bad_key(tmp_path):
    assert run(tmp_path, "superpose", {"nmax": 3}) == cli.EXIT_CONFIG


def test_json_out_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    assert run(tmp_path, "steady", {"g": 1, "kappa": 2, "epsilon": EPS, "engines": ["analytic"]},
               "--out", str(target)) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["params"]["gamma_c"] == 2.0


def test_console_entry_point(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"g": 1, "kappa": 2, "epsilon": EPS, "engines": ["analytic"]}))
    proc = subprocess.run([sys.executable, "-m", "cavitylab.cli", "steady", "--config", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stderr == ""
    assert json.loads(proc.stdout)["engines"]["analytic"]["nbar"] == pytest.approx(0.25, abs=1e-8)
    bad = subprocess.run([sys.executable, "-m", "cavitylab.cli", "bogus", "--config", str(path)],
                         capture_output=True, text=True)
    assert bad.returncode == 2
