import json
import math

import numpy as np
import pytest

from galphac import states
from galphac.cli import main
from galphac.core import DensityMatrix
from galphac.io import save_density, save_state


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_measure_csv(capsys):
    code, out, _ = run(capsys, "measure", "ghz:3", "--measure", "galphac", "--measure", "gmc")
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "measure,cut,value"
    agg = {l.split(",")[0]: float(l.split(",")[2]) for l in lines if ",aggregate," in l}
    assert agg["galphac(alpha=0.5)"] == pytest.approx(math.sqrt(2) - 1, abs=1e-12)
    assert agg["gmc"] == pytest.approx(1.0, abs=1e-12)
    assert "galphac(alpha=0.5),0|12," in out
    assert "# version:" in out


def test_measure_json_from_file(tmp_path, capsys):
    path = tmp_path / "w.json"
    save_state(states.w(4), path)
    code, out, _ = run(capsys, "measure", str(path), "--measure", "galphac(alpha=0.5)", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["local_dims"] == [2, 2, 2, 2]
    assert data["reports"][0]["aggregate"] == pytest.approx(0.38595006864814774, abs=1e-12)
    assert "formula" in data["reports"][0]


def test_sweep_csv_is_bitwise_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "fam4", "--measure", "galphac", "--measure", "ggm", "--step", "0.05"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = [l for l in a.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "theta,galphac(alpha=0.5),ggm"
    assert len(rows) == 1 + 32


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "typeB", "--step", "0.1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["family"] == "typeB"
    assert len(data["theta"]) == 16


@pytest.mark.parametrize("fig", ["1", "4"])
def test_reproduce_passes(fig, tmp_path, capsys):
    csv, gp = tmp_path / "f.csv", tmp_path / "f.gp"
    code = main(["reproduce", fig, "--out", str(csv), "--gnuplot", str(gp)])
    assert code == 0
    text = csv.read_text()
    assert "FAIL" not in text and "pass" in text
    assert str(csv) in gp.read_text()


def test_reproduce_coarse_grid_fails_peak_check(capsys):
    # a 0.05 grid cannot land within 0.005 of every peak
    code, out, _ = run(capsys, "reproduce", "4", "--step", "0.05")
    assert code == 1
    assert "FAIL" in out


def test_bound_check(capsys):
    code, out, _ = run(capsys, "bound-check", "--trials", "40", "--dims", "2,2,2", "--alpha", "0.25", "--alpha", "0.5")
    assert code == 0
    assert out.count("cut_violations=0/") == 2
    assert "# seed: 0" in out
    code, out, _ = run(capsys, "bound-check", "--trials", "10", "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["ok"] is True


def test_roof_json_deterministic(tmp_path, capsys):
    path = tmp_path / "rho.json"
    save_density(DensityMatrix(np.diag([0.5, 0, 0, 0, 0, 0, 0, 0.5]), (2, 2, 2)), path)
    args = ["roof", str(path), "--restarts", "2", "--max-iterations", "300", "--seed", "3"]
    code, out1, _ = run(capsys, *args)
    assert code == 0
    _, out2, _ = run(capsys, *args)
    assert out1 == out2
    data = json.loads(out1)
    assert data["kind"] == "upper_bound"
    assert data["upper_bound"] <= 1e-3
    code, out, _ = run(capsys, "roof", str(path), "--cut", "0|12", "--restarts", "1", "--max-iterations", "100")
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["measure", "nope:3"],
        ["measure", "ghz:3", "--measure", "galphac(alpha=0.9)"],
        ["measure", "ghz:2"],
        ["sweep", "typeA", "--step", "-1"],
        ["bound-check", "--trials", "0"],
        ["reproduce", "5"],
        ["frobnicate"],
        [],
    ],
)
def test_input_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_malformed_and_unnormalized_files_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["measure", str(bad)]) == 2
    unnorm = tmp_path / "u.json"
    unnorm.write_text(json.dumps({"local_dims": [2, 2, 2], "amplitudes": [[1, 0]] * 8}))
    code, _, err = run(capsys, "measure", str(unnorm))
    assert code == 2
    assert "error" in err
    assert main(["roof", str(unnorm)]) == 2
