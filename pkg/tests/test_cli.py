import json
import subprocess
import sys

import numpy as np
import pytest

from hcbf.cli import EXIT_INVALID, EXIT_OK, EXIT_ORACLE_GAP, EXIT_RUN_FAILED, main
from hcbf.io import csv_header, log_from_csv

NO_OBSTACLES = {
    "name": "empty",
    "agent": {"p": [0.0, 0.0], "v": [0.0, 0.5], "radius": 0.3},
    "goal": [3.0, 1.0],
    "limits": {"u_max": 1.0},
    "sim": {"dt": 0.05, "duration": 5.0},
}


def _write(tmp_path, doc, name="scenario.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_run_flyby_least_restrictive(tmp_path, capsys):
    rc = main(["run", "flyby", "--mode", "least-restrictive", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    text = (tmp_path / "flyby_least-restrictive.csv").read_text()
    log = log_from_csv(text)
    assert text.splitlines()[0] == ",".join(csv_header(1))
    assert np.array_equal(log.u, log.u_des)
    m = json.loads((tmp_path / "flyby_least-restrictive_metrics.json").read_text())
    assert m["intervention_integral"] <= 1e-6 and m["outcome"] == "success"
    for stem in ("plan", "constraint", "intervention", "goal_distance"):
        assert (tmp_path / f"flyby_least-restrictive_{stem}.svg").exists()
    assert "success" in capsys.readouterr().out


def test_run_flyby_orthogonal_interval(tmp_path):
    assert main(["run", "flyby", "--mode", "orthogonal", "--out", str(tmp_path), "--no-svg"]) == EXIT_OK
    log = log_from_csv((tmp_path / "flyby_orthogonal.csv").read_text())
    assert np.any(np.linalg.norm(log.u - log.u_des, axis=1) > 1e-6)
    m = json.loads((tmp_path / "flyby_orthogonal_metrics.json").read_text())
    lo, hi = m["intervention_interval"]
    assert 0 < lo < hi
    assert not list(tmp_path.glob("*.svg"))


def test_run_negative_u_max(tmp_path, capsys):
    doc = dict(NO_OBSTACLES, limits={"u_max": -1.0})
    rc = main(["run", _write(tmp_path, doc), "--out", str(tmp_path)])
    assert rc == EXIT_INVALID
    assert "limits.u_max" in capsys.readouterr().err


def test_run_malformed_json(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text('{"agent": {"p": [0, 0]},,}')
    assert main(["run", str(p), "--out", str(tmp_path)]) == EXIT_INVALID
    assert "broken.json:1:" in capsys.readouterr().err


def test_run_fixed_theta_needs_values(tmp_path):
    assert main(["run", "flyby", "--mode", "fixed-theta", "--out", str(tmp_path)]) == EXIT_INVALID


SQUEEZE = {
    "name": "squeeze",
    "agent": {"p": [0.0, 0.0], "v": [0.5, 0.0], "radius": 0.5},
    "goal": [7.0, 0.0],
    "gains": {"kp": 0.3, "kd": 0.8},
    "limits": {"u_max": 1.0},
    "sim": {"dt": 0.01, "duration": 8.0},
    "obstacles": [
        {"shape": {"type": "disc", "radius": 0.6}, "position": [2.5, 0.3]},
        {"shape": {"type": "polygon", "vertices": [[-0.5, -0.5], [0.5, -0.5], [0.0, 0.6]]},
         "position": [4.5, -0.6], "support": {"model": "fourier", "n_terms": 12}},
        {"shape": {"type": "ellipse", "a": 0.8, "b": 0.4, "beta": 0.5},
         "position": [5.0, -4.0], "velocity": [0.0, 0.5]},
    ],
}


def test_run_failure_exit_code(tmp_path, capsys):
    # Same layout as the squeeze case in the simulation tests.
    path = _write(tmp_path, SQUEEZE)
    assert main(["run", path, "--out", str(tmp_path), "--no-svg"]) == EXIT_RUN_FAILED
    assert "filter infeasible, braking" in capsys.readouterr().out
    assert main(["compare", path, "--out", str(tmp_path), "--no-svg"]) == EXIT_RUN_FAILED


def test_compare_blocked_goal(tmp_path, capsys):
    assert main(["compare", "blocked_goal", "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "time to goal (1 m)" in out
    res = json.loads((tmp_path / "blocked_goal_compare.json").read_text())
    lr, orth = res["least-restrictive"], res["orthogonal"]
    assert lr["time_to_goal_1m"] < orth["time_to_goal_1m"]
    assert (tmp_path / "blocked_goal_compare_plan.svg").exists()
    assert (tmp_path / "blocked_goal_least-restrictive.csv").exists()
    assert (tmp_path / "blocked_goal_orthogonal.csv").exists()


def test_compare_zero_obstacles_identical(tmp_path):
    assert main(["compare", _write(tmp_path, NO_OBSTACLES), "--out", str(tmp_path), "--no-svg"]) == EXIT_OK
    res = json.loads((tmp_path / "empty_compare.json").read_text())
    lr, orth = res["least-restrictive"], res["orthogonal"]
    for key in lr:
        if key != "mode":
            assert lr[key] == orth[key], key


def test_fit_support_disc(tmp_path, capsys):
    rc = main(["fit-support", '{"type": "disc", "radius": 0.8}', "--terms", "8", "--out", str(tmp_path)])
    assert rc == EXIT_OK
    rep = json.loads((tmp_path / "support_disc_n8.json").read_text())
    assert rep["nonzero_coefficients"] == 1
    assert rep["a0"] == pytest.approx(1.6)
    assert (tmp_path / "support_disc_n8.svg").exists()


def test_fit_support_square_file(tmp_path):
    shape = {"type": "polygon", "vertices": [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]}
    rc = main(["fit-support", _write(tmp_path, shape, "square.json"), "--out", str(tmp_path)])
    assert rc == EXIT_OK
    rep = json.loads((tmp_path / "support_polygon_n16.json").read_text())
    assert rep["max_residual"] < 0.02 and rep["conservative"] is True
    assert rep["min_slack"] >= -1e-9


def test_fit_support_too_many_terms(tmp_path, capsys):
    rc = main(["fit-support", '{"type": "disc", "radius": 1}', "--terms", "200", "--out", str(tmp_path)])
    assert rc == EXIT_INVALID
    assert "too coarse" in capsys.readouterr().err


def test_fit_support_invalid_shape(tmp_path):
    assert main(["fit-support", '{"type": "disc", "radius": -1}', "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["fit-support", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == EXIT_INVALID


def test_oracle_check_empty(tmp_path, capsys):
    assert main(["oracle-check", "--count", "0", "--out", str(tmp_path)]) == EXIT_OK
    files = list(tmp_path.glob("oracle_check_*.json"))
    rep = json.loads(files[0].read_text())
    assert rep["instances"] == [] and rep["passed"] is True
    assert "PASS" in capsys.readouterr().out


def test_oracle_check_small(tmp_path):
    assert main(["oracle-check", "--seed", "3", "--count", "3", "--u-resolution", "401",
                 "--theta-resolution", "720", "--out", str(tmp_path)]) == EXIT_OK


def test_oracle_check_gap_exit_code(tmp_path, monkeypatch):
    import hcbf.cli as cli
    monkeypatch.setattr(cli, "oracle_check", lambda *a, **k: {"passed": False, "max_gap": 0.5})
    assert main(["oracle-check", "--count", "1", "--out", str(tmp_path)]) == EXIT_ORACLE_GAP


def test_oracle_check_negative_count(tmp_path):
    assert main(["oracle-check", "--count", "-1", "--out", str(tmp_path)]) == EXIT_INVALID


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("HCBF_OUT_DIR", str(tmp_path / "env-out"))
    assert main(["run", _write(tmp_path, NO_OBSTACLES), "--no-svg"]) == EXIT_OK
    assert (tmp_path / "env-out" / "empty_least-restrictive.csv").exists()


def test_outputs_byte_identical(tmp_path):
    for d in ("a", "b"):
        assert main(["run", "flyby", "--mode", "orthogonal", "--out", str(tmp_path / d)]) == EXIT_OK
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes(), f.name


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "hcbf", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("run", "compare", "fit-support", "oracle-check"):
        assert cmd in out.stdout
