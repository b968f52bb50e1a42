"""Experiment runner: config loading, validation, artifacts, determinism."""

import hashlib
import json
import math

import numpy as np
import pytest

from hetero_rd.cli import main as cli_main
from hetero_rd.errors import ParseError, ValidationError
from hetero_rd.grid import build_grid
from hetero_rd.harness import (
    ExperimentSpec,
    build_preset_spec,
    emit_metrics,
    emit_snapshot_csv,
    load_spec,
    read_snapshot_csv,
    run_experiment,
    run_preset,
    validate_spec,
)
from hetero_rd.solver import Field, Trajectory

SMALL = {"n_cells": 200, "dt": 1e-3}


class TestLoadAndValidate:
    def test_minimal_preset_config_fills_defaults(self, tmp_path):
        cfg = tmp_path / "spec.json"
        cfg.write_text('{"preset": "fig2_snapshots"}')
        spec = load_spec(cfg)
        assert spec.preset == "fig2_snapshots"
        assert spec.n_cells == 4000
        assert validate_spec(spec) == []

    def test_epsilon_zero_rejected(self):
        spec = ExperimentSpec(out_dir="x", eps_values=(0.0,))
        problems = validate_spec(spec)
        assert any("epsilon must be in (0, 1]" in p for p in problems)

    def test_misaligned_interface_named(self):
        spec = ExperimentSpec(out_dir="x", n_cells=10, interfaces=(1.05, 3.0))
        problems = validate_spec(spec)
        assert any("InterfaceNotOnFace" in p for p in problems)

    def test_all_violations_reported(self):
        spec = ExperimentSpec(out_dir="x", eps_values=(0.0, 2.0), dt=-1.0,
                              theta=0.1, workers=0)
        problems = validate_spec(spec)
        assert len(problems) >= 5

    def test_parse_error_has_location(self, tmp_path):
        cfg = tmp_path / "broken.json"
        cfg.write_text('{"preset": oops}')
        with pytest.raises(ParseError, match="line 1"):
            load_spec(cfg)

    def test_unknown_field_rejected(self, tmp_path):
        cfg = tmp_path / "extra.json"
        cfg.write_text('{"preset": "fig2_snapshots", "mesh_size": 4}')
        with pytest.raises(ParseError, match="mesh_size"):
            load_spec(cfg)

    def test_unknown_preset(self):
        with pytest.raises(ValidationError):
            build_preset_spec("fig9_imaginary")


class TestEmitters:
    def test_snapshot_csv_shape(self, tmp_path):
        g = build_grid(1.0, 2, [])
        traj = Trajectory(fields=[Field(grid=g, values=np.array([0.25, 0.75]),
                                        t=0.0)])
        path = tmp_path / "snap.csv"
        emit_snapshot_csv(traj, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "t,x,u"
        assert len(lines) == 3

    def test_round_trip_is_bitwise(self, tmp_path):
        g = build_grid(4.0, 64, [1.0, 3.0])
        rng = np.random.default_rng(2)
        fields = [Field(grid=g, values=rng.uniform(0, 1, 64), t=t)
                  for t in (0.0, 1.0 / 3.0)]
        traj = Trajectory(fields=fields)
        path = tmp_path / "snap.csv"
        emit_snapshot_csv(traj, path)
        t, x, u = read_snapshot_csv(path)
        assert np.array_equal(u[:64], fields[0].values)
        assert np.array_equal(u[64:], fields[1].values)
        assert np.array_equal(x[:64], g.cell_centers)
        assert t[64] == 1.0 / 3.0

    def test_metrics_csv_unions_keys(self, tmp_path):
        path = tmp_path / "metrics.csv"
        emit_metrics([{"metric": "a", "value": 1.0},
                      {"metric": "b", "eps": 0.5}], path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "metric,value,eps"
        assert len(lines) == 3


class TestRunPreset:
    def test_override_recorded_in_manifest(self, tmp_path):
        manifest = run_preset("fig2_snapshots", {**SMALL, "n_cells": 400},
                              str(tmp_path))
        assert manifest.spec["n_cells"] == 400
        assert all(r["status"] == "ok" for r in manifest.runs)

    def test_checksums_match_files(self, tmp_path):
        manifest = run_preset("fig2_snapshots", SMALL, str(tmp_path))
        for name, digest in manifest.files.items():
            actual = hashlib.sha256((tmp_path / name).read_bytes()).hexdigest()
            assert actual == digest

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        m1 = run_preset("fig2_snapshots", {**SMALL, "workers": 1},
                        str(tmp_path / "w1"))
        m2 = run_preset("fig2_snapshots", {**SMALL, "workers": 2},
                        str(tmp_path / "w2"))
        assert set(m1.files) == set(m2.files)
        for name in m1.files:
            assert (tmp_path / "w1" / name).read_bytes() == \
                (tmp_path / "w2" / name).read_bytes()

    def test_fig4_summary_schema(self, tmp_path):
        run_preset("fig4_gradient_decay", SMALL, str(tmp_path))
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert set(summary["fits"]) == {"t=0.01", "t=0.04", "t=0.09"}
        for fit in summary["fits"].values():
            assert set(fit) == {"a", "b", "residual"}

    def test_fig3_emits_neumann_reference(self, tmp_path):
        manifest = run_preset("fig3_limit_comparison", SMALL, str(tmp_path))
        assert "snapshots_neumann.csv" in manifest.files
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert len(summary["neumann_gaps"]) == 4

    def test_failed_run_recorded_not_raised(self, tmp_path):
        # An unreachable Newton tolerance kills every run; the manifest must
        # record the failures instead of raising.
        manifest = run_preset(
            "fig2_snapshots",
            {**SMALL, "newton_tol": 1e-30, "newton_max_iter": 1},
            str(tmp_path))
        assert all(r["status"] == "error" for r in manifest.runs)
        assert all("NewtonDiverged" in r["error"] for r in manifest.runs)
        assert (tmp_path / "manifest.json").exists()

    def test_custom_spec_without_preset(self, tmp_path):
        spec = ExperimentSpec(out_dir=str(tmp_path), n_cells=200, dt=1e-3,
                              eps_values=(0.5, math.exp(-2)),
                              delta_values=(0.1,), t_end=0.05,
                              snapshot_times=(0.0, 0.05))
        manifest = run_experiment(spec)
        tags = {r["tag"] for r in manifest.runs}
        assert len(tags) == 4  # two sharp runs + one smoothed per epsilon
        assert all(r["status"] == "ok" for r in manifest.runs)

    def test_invalid_spec_raises_before_running(self, tmp_path):
        spec = ExperimentSpec(out_dir=str(tmp_path), eps_values=(2.0,))
        with pytest.raises(ValidationError):
            run_experiment(spec)


class TestCli:
    def test_run_preset_exit_zero(self, tmp_path, capsys):
        code = cli_main(["run", "--preset", "fig2_snapshots",
                         "--out", str(tmp_path), "--nx", "200",
                         "--dt", "1e-3"])
        assert code == 0
        assert "artifacts written" in capsys.readouterr().out

    def test_validate_good_config(self, tmp_path, capsys):
        cfg = tmp_path / "ok.json"
        cfg.write_text('{"preset": "fig2_snapshots"}')
        assert cli_main(["validate", "--config", str(cfg)]) == 0

    def test_validate_bad_config_exit_two(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text('{"preset": "fig2_snapshots", "eps_values": [0.0]}')
        assert cli_main(["validate", "--config", str(cfg)]) == 2
        assert "epsilon" in capsys.readouterr().err

    def test_validate_parse_error_exit_two(self, tmp_path):
        cfg = tmp_path / "broken.json"
        cfg.write_text("{nope}")
        assert cli_main(["validate", "--config", str(cfg)]) == 2

    def test_run_requires_preset_or_config(self):
        assert cli_main(["run"]) == 2

    def test_run_failure_exit_one(self, tmp_path):
        cfg = tmp_path / "doomed.json"
        cfg.write_text(json.dumps({
            "preset": "fig2_snapshots", "n_cells": 200, "dt": 1e-3,
            "newton_tol": 1e-30, "newton_max_iter": 1,
        }))
        code = cli_main(["run", "--config", str(cfg),
                         "--out", str(tmp_path / "out")])
        assert code == 1

    def test_eps_override(self, tmp_path):
        code = cli_main(["run", "--preset", "fig2_snapshots",
                         "--out", str(tmp_path), "--nx", "200",
                         "--dt", "1e-3", "--eps", "0.5,0.25"])
        assert code == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert len(manifest["runs"]) == 2
