import json
import re
from pathlib import Path

import pytest

from giant_emitters.cli import main
from giant_emitters.presets import PRESETS, preset_config

ROOT = Path(__file__).resolve().parents[1]

SMALL_CONFIG = {
    "scenarios": [
        {"name": "small", "params": {"delta": 1.0}, "grid": {"t_max": 20.0, "n_t": 201}, "outputs": ["trace", "bound_states", "rates", "entropy"]},
        {"name": "giant", "params": {"nc": 2, "d": 4, "delta": 0.0}, "grid": {"t_max": 10.0, "n_t": 51, "lattice_half_width": 60}, "outputs": ["trace", "field", "spectral"], "oracle": True},
    ]
}


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(SMALL_CONFIG))
    return path


def test_simulate_writes_outputs_and_manifest(tmp_path, config, capsys):
    code, out, _ = run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "o"))
    assert code == 0
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    files = {f for s in manifest["scenarios"] for f in s["files"]}
    assert {"small/trace.csv", "small/bound_states.csv", "small/master_eq.csv", "giant/field.csv", "giant/field.npz", "giant/spectral.csv", "giant/oracle_trace.csv"} <= files
    giant = [s for s in manifest["scenarios"] if s["name"] == "giant"][0]
    assert giant["oracle"]["pass"]
    assert giant["oracle"]["quantities"]["abs2_alpha"]["max_abs"] < 1e-6
    assert json.loads(out)["version"] == manifest["version"]


def test_determinism(tmp_path, config, capsys):
    run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "a"))
    run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "b"))
    a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert [s["files"] for s in a["scenarios"]] == [s["files"] for s in b["scenarios"]]


def test_parallel_workers_match_serial(tmp_path, config, capsys, monkeypatch):
    run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "serial"))
    monkeypatch.setenv("GIANT_EMITTERS_WORKERS", "2")
    run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "par"))
    a = json.loads((tmp_path / "serial" / "manifest.json").read_text())
    b = json.loads((tmp_path / "par" / "manifest.json").read_text())
    assert [s["files"] for s in a["scenarios"]] == [s["files"] for s in b["scenarios"]]


def test_bad_worker_env(tmp_path, config, capsys, monkeypatch):
    monkeypatch.setenv("GIANT_EMITTERS_WORKERS", "many")
    code, _, err = run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "x"))
    assert code == 2
    assert json.loads(err)["error"] == "CliError"


def test_validation_error_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "params": {"nc": 2, "d": 3}}))
    code, _, err = run_cli(capsys, "simulate", str(path), "-o", str(tmp_path / "o"))
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "ValidationError"
    assert "d must be even" in payload["message"]


def test_missing_config_is_io_error(tmp_path, capsys):
    code, _, err = run_cli(capsys, "simulate", str(tmp_path / "nope.json"))
    assert code == 5
    assert json.loads(err)["error"] == "FileNotFoundError"


def test_oracle_failure_exit_code(tmp_path, capsys):
    cfg = {"name": "edge", "params": {"delta": 0.0}, "grid": {"t_max": 20.0, "n_t": 21, "lattice_half_width": 41}, "oracle": True}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    # the wavefront reaches the boundary of this short chain
    code, _, err = run_cli(capsys, "simulate", str(path), "-o", str(tmp_path / "o"))
    assert code == 4
    assert json.loads(err)["error"] == "LatticeError"


def test_compare_identical_and_perturbed(tmp_path, config, capsys):
    run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "o"))
    trace = tmp_path / "o" / "small" / "trace.csv"
    code, out, _ = run_cli(capsys, "compare", str(trace), str(trace))
    assert code == 0
    report = json.loads(out)
    assert all(q["max_abs"] == 0 for q in report["quantities"].values())
    lines = trace.read_text().splitlines()
    cols = lines[10].split(",")
    cols[3] = repr(float(cols[3]) + 0.01)
    lines[10] = ",".join(cols)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    code, _, err = run_cli(capsys, "compare", str(trace), str(bad))
    assert code == 1
    code, out, _ = run_cli(capsys, "compare", str(trace), str(bad), "--tolerance", "0.1")
    assert code == 0


def test_compare_grid_mismatch(tmp_path, config, capsys):
    run_cli(capsys, "simulate", str(config), "-o", str(tmp_path / "o"))
    code, _, err = run_cli(capsys, "compare", str(tmp_path / "o" / "small"), str(tmp_path / "o" / "giant"))
    assert code == 2
    assert "grids differ" in json.loads(err)["message"]


def test_bound_states_command(config, capsys):
    code, out, _ = run_cli(capsys, "bound-states", str(config))
    assert code == 0
    report = json.loads(out)
    kinds = [b["kind"] for b in report["scenarios"][0]["bound_states"]]
    assert kinds == ["BOC_lower", "BOC_upper"]


def test_circuit_command(capsys):
    code, out, _ = run_cli(capsys, "circuit", "--table-check")
    assert code == 0
    assert json.loads(out)["table_check"]["pass"]
    code, out, _ = run_cli(capsys, "circuit", "--preset", "table1")
    report = json.loads(out)["scenarios"][0]
    assert max(report["target_relative_error"].values()) < 1e-3
    assert report["effective"]["model_units"]["g0"] == pytest.approx(0.2)


def test_circuit_from_elements(tmp_path, capsys):
    cfg = {"name": "c", "circuit": {"l0": 1.5e-9, "c0": 400e-15, "c": 40e-15, "cg": 4e-15, "c_sigma_q": 80e-15, "ej": 1e-23, "ec": 1.6e-25}}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = run_cli(capsys, "circuit", str(path))
    assert code == 0
    assert json.loads(out)["scenarios"][0]["effective"]["si_rad_per_s"]["xi"] > 0


def test_presets_list_and_show(capsys):
    code, out, _ = run_cli(capsys, "presets", "--list")
    names = json.loads(out)["presets"]
    assert {"fig2b", "fig2c", "fig6c", "fig7b", "table1"} <= set(names)
    code, out, _ = run_cli(capsys, "presets", "--show", "fig6c")
    scen = json.loads(out)["scenarios"]
    assert [s["params"]["d"] for s in scen] == [2, 12]
    code, _, err = run_cli(capsys, "presets", "--show", "fig99")
    assert code == 2


def test_every_preset_loads_and_is_documented():
    from giant_emitters.model import scenarios_from_config

    readme = (ROOT / "README.md").read_text()
    for name in PRESETS:
        assert scenarios_from_config(preset_config(name))
        assert re.match(r"^(fig\d+[a-z]?|table\d)$", name)
        assert f"`{name}`" in readme


def test_fig2b_is_detuning_sweep():
    scen = preset_config("fig2b")["scenarios"][0]
    deltas = scen["sweep"]["delta"]
    assert deltas[0] == pytest.approx(-2.5) and deltas[-1] == pytest.approx(2.5)


def test_sweep_outputs(tmp_path, capsys):
    cfg = {"name": "sw", "params": {"delta": 0.0}, "grid": {"t_max": 5.0, "n_t": 11}, "outputs": ["trace", "bound_states"], "sweep": {"delta": [0.0, 1.0]}}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    code, _, _ = run_cli(capsys, "simulate", str(path), "-o", str(tmp_path / "o"))
    assert code == 0
    lines = (tmp_path / "o" / "sw" / "sweep_trace.csv").read_text().splitlines()
    assert lines[0] == "delta,t,abs2_alpha"
    assert len(lines) == 1 + 2 * 11
    assert (tmp_path / "o" / "sw" / "sweep_bound_states.csv").exists()
