import json
import math
import subprocess
import sys

import pytest

from hybridoptomech import experiments
from hybridoptomech.cli import main
from hybridoptomech.experiments import CellOutcome
from hybridoptomech.output import read_csv

KERR_CONFIG = {
    "mode": "physical",
    "params": {"kappa": 5.0, "gamma": 1.0, "delta_c": 50.0, "g0": 0.1, "eta": math.sqrt(60.0 * 125.0 / 0.01), "gamma_m": 1.0},
}


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_spectrum_csv_round_trip(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(["spectrum", "--preset", "fig3", "--omega-points", "41", "--out", str(out)], capsys)
    assert code == 0
    header, cols, rows = read_csv(out.read_text())
    assert cols == ["omega", "s_kappa", "s_gamma", "s_f"]
    assert len(rows) == 41
    assert all(r[3] == r[1] + r[2] for r in rows)
    assert (tmp_path / "s.png").stat().st_size > 0
    from hybridoptomech.config import load_config
    from hybridoptomech.spectra import force_spectrum

    lin = load_config(str(out)).linear_params()
    s = force_spectrum(lin, [r[0] for r in rows])
    assert list(s.s_f) == [r[3] for r in rows]


def test_spectrum_without_dopant(capsys):
    code, text, _ = run(["spectrum", "--preset", "fig3", "--set", "lambda=0", "--set", "mu=0", "--omega-points", "9", "--no-figure"], capsys)
    assert code == 0
    _, _, rows = read_csv(text)
    assert all(r[2] == 0.0 for r in rows)


def test_occupation_json(capsys):
    code, text, _ = run(["occupation", "--preset", "fig3"], capsys)
    rec = json.loads(text)["meta"]["record"]
    assert code == 0 and rec["stable"] and rec["cooperativity"] == 4.0
    assert rec["n_f"] == pytest.approx(0.74, abs=0.03)
    assert len(rec["eigen_real_parts"]) == 6


def test_occupation_decoupled_and_unstable(capsys):
    _, text, _ = run(["occupation", "--preset", "fig3", "--set", "g=0", "--set", "mu=0", "--set", "lambda=0"], capsys)
    assert json.loads(text)["meta"]["record"]["n_f"] == pytest.approx(1000.0, rel=1e-8)
    _, text, _ = run(["occupation", "--preset", "fig3", "--set", "delta_a=5", "--set", "delta_c=17"], capsys)
    rec = json.loads(text)["meta"]["record"]
    assert rec["stable"] is False and rec["n_f"] is None


def test_map2d_shape_and_rerun(tmp_path, capsys):
    out = tmp_path / "m.csv"
    args = ["map2d", "--preset", "fig3", "--grid", "delta_c=-40:40:2", "--grid", "delta_a=-6:6:2", "--out", str(out)]
    assert run(args, capsys)[0] == 0
    _, cols, rows = read_csv(out.read_text())
    assert cols == ["delta_c", "delta_a", "n_f", "status"] and len(rows) == 4
    assert (tmp_path / "m.png").exists()
    again = tmp_path / "again.csv"
    assert run(["map2d", "--config", str(out), "--out", str(again), "--no-figure"], capsys)[0] == 0
    assert again.read_bytes() == out.read_bytes()


def test_compare_four_curves(capsys):
    code, text, _ = run(["compare", "--preset", "fig4a", "--grid", "delta_c=-60:60:20", "--no-figure"], capsys)
    assert code == 0
    header, _, rows = read_csv(text)
    assert {r[0] for r in rows} == {"radiation_pressure", "dressed_cavity", "dopant", "interference"}
    minima = json.loads(header["minima"])
    assert minima["interference"] < minima["dressed_cavity"] < min(minima["dopant"], minima["radiation_pressure"])


def test_compare_plotdata_blocks(capsys):
    code, text, _ = run(["compare", "--preset", "fig4a", "--grid", "delta_c=-60:60:3", "--format", "plotdata", "--strategy", "interference", "--strategy", "dopant"], capsys)
    body = [l for l in text.splitlines() if not l.startswith("#")]
    # two curves of six points separated by two blank lines
    assert code == 0 and len(body) == 14 and body[6:8] == ["", ""]


def test_resonant_map_small(capsys):
    code, text, _ = run(["resonant-map", "--preset", "fig5b", "--grid", "g=0.01:2:4:log", "--grid", "lambda=0.5:2:3", "--no-figure"], capsys)
    header, cols, rows = read_csv(text)
    assert code == 0 and cols == ["lambda", "g", "mu", "n_f", "status"] and len(rows) == 12
    assert json.loads(header["radiation_pressure"])["delta_c"] == 1.0


def test_steady_state_kerr(tmp_path, capsys):
    cfg = tmp_path / "kerr.json"
    cfg.write_text(json.dumps(KERR_CONFIG))
    out = tmp_path / "kerr.csv"
    code, _, _ = run(["steady-state", "--config", str(cfg), "--out", str(out)], capsys)
    header, _, rows = read_csv(out.read_text())
    assert code == 0 and len(rows) == 3
    assert [r[8] for r in rows] == [True, False, True]
    assert header["bistable"] == "true"
    assert (tmp_path / "kerr.png").exists()

    # two stable branches: linearization needs an explicit choice
    code, _, err = run(["occupation", "--config", str(cfg)], capsys)
    assert code == 1 and "--branch" in err
    code, text, _ = run(["occupation", "--config", str(cfg), "--branch", "2"], capsys)
    assert code == 0 and json.loads(text)["meta"]["record"]["stable"]


def test_fatal_errors_exit_one(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mode": "linear", "params": {"kappa": -1.0, "gamma": 1.0}}))
    code, _, err = run(["occupation", "--config", str(bad)], capsys)
    assert code == 1 and "kappa" in err
    assert run(["steady-state", "--preset", "fig3"], capsys)[0] == 1
    assert run(["map2d", "--preset", "fig4a"], capsys)[0] == 1


def test_cell_errors_exit_two(monkeypatch, capsys):
    monkeypatch.setattr(experiments, "evaluate_cell", lambda lin: CellOutcome(None, "error", None, "forced"))
    code, text, _ = run(["map2d", "--preset", "fig3", "--grid", "delta_c=-4:4:2", "--grid", "delta_a=-1:1:2", "--no-figure"], capsys)
    assert code == 2
    _, _, rows = read_csv(text)
    assert all(r[3] == "error" for r in rows)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hybridoptomech", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "hybridoptomech" in proc.stdout


def test_workers_env_default(monkeypatch, tmp_path, capsys):
    args = ["map2d", "--preset", "fig3", "--grid", "delta_c=-40:40:6", "--grid", "delta_a=-6:6:6", "--no-figure"]
    _, serial, _ = run(args, capsys)
    monkeypatch.setenv("HYBRIDOPTOMECH_WORKERS", "2")
    _, parallel, _ = run(args, capsys)
    assert serial == parallel
