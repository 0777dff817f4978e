"""End-to-end command-line runs against temporary output directories."""

import json
import math

import numpy as np
import pytest

from faquad import cli

TWO_LEVEL_FLAGS = ["--model", "two-level", "--U", "22.3",
                   "--lambda-start", "66.7", "--lambda-end", "0"]


def _read_csv(path):
    with open(path) as handle:
        header = handle.readline().strip()
        rows = [line.strip().split(",") for line in handle if line.strip()]
    return header, rows


def test_design_writes_trajectory_and_manifest(tmp_path):
    out = tmp_path / "design"
    code = cli.main(["design", *TWO_LEVEL_FLAGS, "--protocol", "faquad",
                     "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out / "trajectory.csv")
    assert header == "s,lambda"
    assert float(rows[0][0]) == 0.0 and float(rows[0][1]) == 66.7
    assert float(rows[-1][0]) == 1.0 and float(rows[-1][1]) == 0.0

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "design"
    assert manifest["derived"]["c_tilde"] == pytest.approx(0.35179079601708424, rel=1e-9)
    assert manifest["derived"]["phi"] == pytest.approx(4.195468594893811, rel=1e-9)
    assert "trajectory.csv" in manifest["outputs"]
    assert "version" in manifest and "wall_time_s" in manifest


def test_reruns_are_byte_identical(tmp_path):
    args = ["design", *TWO_LEVEL_FLAGS, "--protocol", "faquad"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()


def test_csv_precision_roundtrip(tmp_path):
    out = tmp_path / "rt"
    assert cli.main(["design", *TWO_LEVEL_FLAGS, "--protocol", "faquad",
                     "--out", str(out)]) == 0
    _, rows = _read_csv(out / "trajectory.csv")
    values = np.array([float(r[1]) for r in rows])
    from faquad import model, protocol
    spec = model.two_level(U=22.3, delta_start=66.7, delta_end=0.0)
    traj = protocol.design_faquad(spec)
    assert np.max(np.abs(values - traj.values)) <= 1e-10 * 66.7


def test_unknown_config_key_is_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"model": {"kind": "two-level", "U": 22.3,
                                         "lambda_start": 66.7, "lambda_end": 0.0,
                                         "typo_key": 1}}))
    code = cli.main(["design", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "typo_key" in capsys.readouterr().err


def test_invalid_json_is_rejected(tmp_path):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    assert cli.main(["design", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2


def test_missing_model_is_rejected(tmp_path):
    assert cli.main(["design", "--out", str(tmp_path / "o")]) == 2


def test_small_ring_truncation_rejected(tmp_path):
    assert cli.main(["design", "--model", "ring", "--u0", "0.5", "--K", "6",
                     "--out", str(tmp_path / "o")]) == 2


def test_numerical_failure_maps_to_exit_3(tmp_path, capsys):
    # A barrier-free ring makes the requested pair exactly degenerate,
    # which is a numerical (not configuration) failure.
    code = cli.main(["design", "--model", "ring", "--u0", "0", "--K", "20",
                     "--pair", "2", "3", "--out", str(tmp_path / "o")])
    assert code == 3


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "model": {"kind": "two-level", "U": 10.0,
                  "lambda_start": 66.7, "lambda_end": 0.0},
        "protocol": {"kind": "faquad"},
    }))
    out = tmp_path / "o"
    assert cli.main(["design", "--config", str(cfg), "--U", "22.3",
                     "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["model"]["U"] == 22.3
    assert manifest["derived"]["c_tilde"] == pytest.approx(0.35179079601708424, rel=1e-9)


def test_builtin_presets_are_complete():
    figs = cli.builtin_figures()
    assert sorted(figs) == ["fig1b", "fig1d", "fig3b", "fig4b",
                            "fig5a", "fig5b", "fig6a", "fig6b"]
    assert figs["fig3b"]["model"]["U"] == 33.45
    assert figs["fig3b"]["model"]["lambda_start"] == 100.0
    assert figs["fig3b"]["target"] == 2
    assert figs["fig4b"]["model"]["lambda_end"] == -66.7
    assert figs["fig6b"]["sweep"]["tf"] == 90.0
    assert figs["fig6b"]["sweep"]["N"] == [3, 9]
    assert figs["fig5a"]["model"]["K"] == 60


def test_figure_preset_with_overrides(tmp_path):
    out = tmp_path / "f1b"
    code = cli.main(["figure", "fig1b", "--tf-min", "0.5", "--tf-max", "2.0",
                     "--tf-count", "6", "--n-steps", "2048", "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out / "sweep_faquad.csv")
    assert header == "tf,population"
    assert len(rows) == 6
    assert float(rows[0][0]) == 0.5 and float(rows[-1][0]) == 2.0
    header, _ = _read_csv(out / "prediction_faquad.csv")
    assert header == "tf,predicted_infidelity,envelope"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["derived"]["c_tilde_faquad"] == pytest.approx(
        0.35179079601708424, rel=1e-9)


def test_sweep_tf_outputs(tmp_path):
    out = tmp_path / "sw"
    code = cli.main(["sweep-tf", *TWO_LEVEL_FLAGS, "--protocol", "faquad",
                     "--tf-min", "0.5", "--tf-max", "1.5", "--tf-count", "5",
                     "--n-steps", "2048", "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out / "sweep.csv")
    assert header == "tf,population"
    assert len(rows) == 5
    pops = [float(r[1]) for r in rows]
    assert all(0.0 <= p <= 1.0 + 1e-9 for p in pops)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["point_failures"] == []
    assert manifest["derived"]["n_steps"] == 2048


def test_sweep_eps_outputs(tmp_path):
    out = tmp_path / "eps"
    code = cli.main(["sweep-eps", "--model", "ring", "--u0", "0.5", "--K", "40",
                     "--N", "3", "--tf", "20", "--eps", "-0.1", "--eps", "0",
                     "--n-steps", "1500", "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out / "epsilon.csv")
    assert header == "epsilon,fidelity,N"
    assert [r[2] for r in rows] == ["3", "3"]
    assert float(rows[1][0]) == 0.0


def test_evolve_projection_output(tmp_path):
    out = tmp_path / "ev"
    code = cli.main(["evolve", *TWO_LEVEL_FLAGS, "--protocol", "faquad",
                     "--tf", "1.5", "--n-steps", "2048", "--n-save", "11",
                     "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out / "projection.csv")
    assert header == "t,n,re_g,im_g"
    assert len(rows) == 11 * 2
    assert float(rows[0][2]) == 1.0 and float(rows[0][3]) == 0.0
    manifest = json.loads((out / "manifest.json").read_text())
    pops = manifest["derived"]["final_populations"]
    assert sum(pops) == pytest.approx(1.0, abs=1e-9)


def test_spectrum_outputs_ring_oracle_files(tmp_path):
    out = tmp_path / "sp"
    code = cli.main(["spectrum", "--model", "ring", "--u0", "4", "--K", "20",
                     "--points", "7", "--levels", "4", "--out", str(out)])
    assert code == 0
    header, rows = _read_csv(out / "spectrum.csv")
    assert header == "lambda,n,energy"
    assert len(rows) == 7 * 4
    header, rows = _read_csv(out / "alpha.csv")
    assert header == "lambda,n,alpha,energy"
    for r in rows:
        assert float(r[3]) == pytest.approx(float(r[2]) ** 2, rel=1e-9)


def test_workers_env_does_not_change_results(tmp_path, monkeypatch):
    args = ["sweep-tf", *TWO_LEVEL_FLAGS, "--protocol", "faquad",
            "--tf-min", "0.5", "--tf-max", "1.5", "--tf-count", "5",
            "--n-steps", "2048"]
    a, b = tmp_path / "a", tmp_path / "b"
    monkeypatch.delenv("FAQUAD_WORKERS", raising=False)
    assert cli.main(args + ["--out", str(a)]) == 0
    monkeypatch.setenv("FAQUAD_WORKERS", "2")
    assert cli.main(args + ["--out", str(b)]) == 0
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_constant_protocol_requires_value(tmp_path):
    assert cli.main(["design", *TWO_LEVEL_FLAGS, "--protocol", "constant",
                     "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["design", *TWO_LEVEL_FLAGS, "--protocol", "constant",
                     "--value", "22.3", "--out", str(tmp_path / "p")]) == 0
