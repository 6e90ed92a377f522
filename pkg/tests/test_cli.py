import csv
import json
import subprocess
import sys

import pytest

from muntz_lab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_muntz_check(capsys):
    code, out, _ = run(capsys, "muntz-check", "--family", "geometric:2", "--n", "5")
    assert code == 0
    assert "convergent" in out


def test_muntz_check_power_json(capsys):
    code, out, _ = run(capsys, "muntz-check", "--family", "power:1", "--n", "5", "--json")
    assert json.loads(out)["verdict"] == "divergent"


def test_bernstein_linear(capsys):
    code, out, _ = run(capsys, "bernstein", "--seq", "0,1", "--a", "0.5")
    assert code == 0
    assert "lower 2.000" in out


def test_bernstein_bad_a(capsys):
    code, _, err = run(capsys, "bernstein", "--seq", "0,1", "--a", "1.5")
    assert code == 2
    assert "out of range" in err


def test_bernstein_json(capsys, tmp_path):
    path = tmp_path / "b.csv"
    code, out, _ = run(capsys, "bernstein", "--seq", "0,1", "--a", "0.5", "--json", "--csv", str(path))
    d = json.loads(out)
    assert d["lower"] == pytest.approx(2, abs=1e-3)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["N", "a", "lower", "upper_heuristic", "converged"]
    assert len(rows) == 2


def test_grid_one_band(capsys, tmp_path):
    path = tmp_path / "g.csv"
    code, out, _ = run(capsys, "grid", "--eps", "0.1", "--anchors", "0.5", "--constants", "10",
                       "--csv", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))[1:]
    # 50 uniform steps of 0.01 overshoot by one ulp, so one more point is needed
    assert len(rows) == 52
    assert "spacing violations 0" in out


def test_grid_embedded_csv(capsys, tmp_path):
    path = tmp_path / "e.csv"
    code, _, _ = run(capsys, "grid", "--seq", "1,2", "--eps", "0.5", "--anchors", "0.5",
                     "--constants", "1", "--coef", "1", "--csv", str(path))
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["index", "s", "f(s)"]
    assert rows[1:] == [["0", "0.0", "0.0"], ["1", "0.5", "0.5"], ["2", "1.0", "1.0"]]


def test_grid_from_estimator(capsys):
    code, out, _ = run(capsys, "grid", "--family", "geometric:2", "--n", "3", "--m", "3", "--json")
    d = json.loads(out)
    assert code == 0 and d["spacing_violations"] == 0


def test_norm_chebyshev(capsys):
    code, out, _ = run(capsys, "norm", "--seq", "0,1,2", "--coef", "1,-8,8", "--json")
    cert = json.loads(out)["certificate"]
    assert cert["lower"] <= 1.0 <= cert["upper"]
    assert cert["upper"] - cert["lower"] <= 1e-6


def test_norm_requires_coef(capsys):
    assert run(capsys, "norm", "--seq", "0,1")[0] == 2


def test_verify_embedding_eps_zero(capsys):
    assert run(capsys, "verify-embedding", "--eps", "0", "--seed", "1")[0] == 2


def test_seed_required(capsys):
    code, _, err = run(capsys, "lasq", "--trials", "5")
    assert code == 2 and "seed" in err


def test_verify_embedding_small(capsys):
    code, out, _ = run(capsys, "verify-embedding", "--seq", "1,2,4", "--trials", "30", "--m", "3",
                       "--seed", "1", "--json")
    assert code == 0
    assert json.loads(out)["violations"] == 0


def test_lasq_trials_zero(capsys):
    assert run(capsys, "lasq", "--trials", "0", "--seed", "1")[0] == 2


def test_lasq_csv(capsys, tmp_path):
    path = tmp_path / "l.csv"
    code, _, _ = run(capsys, "lasq", "--trials", "100", "--refine", "10", "--seed", "2",
                     "--csv", str(path))
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["kind", "N", "x", "a", "epsilon_star", "extremal_value", "violations",
                       "trials", "seed"]
    assert len(rows[1:]) == 1


def test_half_ball_and_oh_probe(capsys):
    assert run(capsys, "half-ball", "--trials", "50", "--seed", "3")[0] == 0
    assert run(capsys, "half-ball", "--trials", "5", "--seed", "3", "--a", "1")[0] == 1
    code, out, _ = run(capsys, "oh-probe", "--trials", "30", "--seed", "3", "--json")
    assert code == 0 and json.loads(out)["kind"] == "oh_probe"


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# bernstein run\nseq = 0,1\na = 0.25\njson = true\n")
    code, out, _ = run(capsys, "bernstein", "--config", str(cfg))
    assert json.loads(out)["a"] == 0.25
    code, out, _ = run(capsys, "bernstein", "--config", str(cfg), "--a", "0.75")
    assert json.loads(out)["a"] == 0.75


def test_bad_config(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("a 0.5\n")
    assert run(capsys, "bernstein", "--config", str(cfg))[0] == 2


def test_bad_sequence(capsys):
    code, _, err = run(capsys, "muntz-check", "--seq", "0,2,1")
    assert code == 2 and "index 2" in err


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "muntz_lab.cli", "muntz-check"],
                         capture_output=True, text=True, check=True).stdout
    assert "verdict convergent" in out
