import json
from pathlib import Path

import pytest

from relbohm.cli import main


def write_cfg(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def run(args):
    return main(args)


def test_modes_bundled_quick(tmp_path):
    out = tmp_path / "out"
    assert run(["modes", "--config", "two_mode.json", "--out", str(out),
                "--quick"]) == 0
    for name in ("f_grid.csv", "trajectories.csv", "summary.json"):
        assert (out / name).is_file()
    head = (out / "f_grid.csv").read_text().splitlines()
    assert head[0].startswith("#")          # metadata comment block
    assert any(ln.startswith("# config:") for ln in head)
    assert any(ln.startswith("# units:") for ln in head)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["pair_events"] == 0
    # equal-weight modes k = 0 and 0.1: mean group velocity is
    # (0 + 0.1/omega(0.1)) / 2
    expect = 0.5 * 0.1 / (1.0 + 0.01) ** 0.5
    assert summary["mean_group_velocity"] == pytest.approx(expect, abs=1e-12)


def test_modes_duplicate_k_rejected(tmp_path):
    cfg = write_cfg(tmp_path, "bad.json", {
        "k": [0.0, 0.0], "phi": [[1, 0], [1, 0]],
        "grid": {"x_min": -1, "x_max": 1, "n_x": 11,
                 "t_min": 0, "t_max": 1, "n_t": 11}})
    assert run(["modes", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_missing_config_is_config_error(tmp_path):
    assert run(["modes", "--config", "no_such_file.json",
                "--out", str(tmp_path / "o")]) == 2


def test_invalid_json_is_config_error(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{nope")
    assert run(["modes", "--config", str(p),
                "--out", str(tmp_path / "o")]) == 2


def test_missing_out_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["modes", "--config", "two_mode.json"])
    assert exc.value.code == 2


def test_threads_must_be_positive(tmp_path):
    assert run(["modes", "--config", "two_mode.json",
                "--out", str(tmp_path / "o"), "--threads", "0"]) == 2


def test_explode_negative_time_rejected(tmp_path):
    cfg = write_cfg(tmp_path, "neg.json", {
        "packet": {"shape": "cos2", "a": 1.0},
        "t_values": [-0.5],
        "grid": {"x_min": 0, "x_max": 1, "n_x": 11,
                 "t_min": 0, "t_max": 1, "n_t": 11}})
    assert run(["explode", "--config", cfg,
                "--out", str(tmp_path / "o")]) == 2


def test_explode_requires_cos2(tmp_path):
    cfg = write_cfg(tmp_path, "g.json", {
        "packet": {"shape": "gaussian", "sigma_k": 0.05},
        "grid": {"x_min": 0, "x_max": 1, "n_x": 11,
                 "t_min": 0, "t_max": 1, "n_t": 11}})
    assert run(["explode", "--config", cfg,
                "--out", str(tmp_path / "o")]) == 2


def test_explode_small_run(tmp_path):
    cfg = write_cfg(tmp_path, "small.json", {
        "packet": {"shape": "cos2", "a": 1.0, "k_cut": 40.0,
                   "gl_order": 8, "x_scale": 4.0},
        "t_values": [0.0], "p_times": [0.0, 1.0], "n_levels": 20,
        "density_x": {"min": -3.0, "max": 3.0, "n": 51},
        "grid": {"x_min": 0.0, "x_max": 1.5, "n_x": 81,
                 "t_min": 0.0, "t_max": 1.0, "n_t": 61}})
    out = tmp_path / "out"
    assert run(["explode", "--config", cfg, "--out", str(out)]) == 0
    th = json.loads((out / "thresholds.json").read_text())
    assert th["x_th"] == pytest.approx(0.5565, abs=5e-3)
    assert th["x_0"] == pytest.approx(0.7249, abs=5e-3)
    assert th["charge_inside"] == pytest.approx(1.0, abs=1e-4)
    assert th["acausal"]["0"] < 1e-6
    assert (out / "density_t0.csv").is_file()
    assert (out / "acausal.csv").is_file()
    assert (out / "fronts.csv").is_file()


def test_nearnr_bundled_quick(tmp_path):
    out = tmp_path / "out"
    assert run(["nearnr", "--config", "gauss.json", "--out", str(out),
                "--quick"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["eq22_max_residual"] < 1e-9
    assert abs(summary["moment0"]) < 1e-8
    assert summary["narrow_k_regime"] is True
    assert summary["pushforward"]["improvement"] > 5.0


def test_nearnr_wide_sigma_warns(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "wide.json", {
        "packet": {"shape": "gaussian", "sigma_k": 0.5,
                   "total_charge": 1.0},
        "x": {"min": -4.0, "max": 4.0, "n": 33}, "t": 0.0})
    assert run(["nearnr", "--config", cfg,
                "--out", str(tmp_path / "o"), "--quick"]) == 0
    assert "narrow-k regime" in capsys.readouterr().err


def test_spin_dirac_bundled_quick(tmp_path):
    out = tmp_path / "out"
    assert run(["spin", "--config", "dirac3.json", "--out", str(out),
                "--quick"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True
    assert report["sign_dictionary_suspect"] is False
    assert report["mass_identity"]["residual_h"] < 1e-5
    assert report["eom"]["residual_h"] < 1e-5


def test_spin_fw_bundled_quick(tmp_path):
    out = tmp_path / "out"
    assert run(["spin", "--config", "fw_hedgehog.json", "--out", str(out),
                "--quick"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["spin_tensor_residual"] < 1e-10
    assert report["curl"]["residual_h2"] < report["curl"]["residual_h"]
    assert report["ensemble_balance"] < 1e-6


def test_spin_unknown_kind(tmp_path):
    cfg = write_cfg(tmp_path, "k.json", {"kind": "pauli"})
    assert run(["spin", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_modes_thread_determinism(tmp_path):
    outs = []
    for n in ("1", "8"):
        out = tmp_path / f"out{n}"
        assert run(["modes", "--config", "two_mode.json", "--out", str(out),
                    "--quick", "--threads", n]) == 0
        outs.append(out)
    for name in ("f_grid.csv", "trajectories.csv", "summary.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_nearnr_thread_determinism(tmp_path):
    outs = []
    for n in ("1", "4"):
        out = tmp_path / f"out{n}"
        assert run(["nearnr", "--config", "gauss.json", "--out", str(out),
                    "--quick", "--threads", n]) == 0
        outs.append(out)
    for name in ("correction.csv", "summary.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
