"""Spec validation, artifact layout, exit codes and reproducibility."""

import json

import numpy as np
import pytest

from cfedge import cli
from cfedge.cli import (COLUMNS, EXIT_INFEASIBLE, EXIT_NUMERICAL, EXIT_OK,
                        EXIT_USAGE, ExperimentSpec, SpecError, _load_spec,
                        _network_for, _points, run_experiment)
from cfedge.errors import NumericalError

from conftest import MU_C, MU_M


def _scmp_spec(**extra):
    base = {
        "kind": "scmp_vs_R",
        "label": "tiny",
        "network": {"lambda_b": 400.0, "lambda_d": 100.0,
                    "antennas_per_ap": 4},
        "sweep": {"radii_km": [0.03, 0.05]},
        "sim": {"replications": 200, "seed": 3},
    }
    base.update(extra)
    return base


def _energy_spec(xi_grid):
    return {
        "kind": "energy_vs_xi",
        "label": "e",
        "network": {"lambda_b": 400.0, "lambda_d": 100.0,
                    "antennas_per_ap": 4},
        "compute": {"type_probs": [1.0], "mu_c": [MU_C[1]], "mu_m": [MU_M[1]],
                    "offload_prob": 0.5, "target_latency": 0.012},
        "energy": {"f_cs_hz": [5e9], "f_mec_hz": [3.4e9]},
        "sweep": {"xi_grid": xi_grid, "r_bounds_km": [0.02, 0.2]},
        "sim": {"seed": 1},
    }


class TestSpecParsing:
    def test_unknown_kind(self):
        with pytest.raises(SpecError, match="unknown kind"):
            ExperimentSpec.from_mapping({"kind": "heatmap"})

    def test_missing_sweep_grid(self):
        with pytest.raises(SpecError, match="radii_km"):
            ExperimentSpec.from_mapping({"kind": "scmp_vs_R", "sweep": {}})

    def test_compute_required(self):
        with pytest.raises(SpecError, match="compute"):
            ExperimentSpec.from_mapping(
                {"kind": "scp_surface",
                 "sweep": {"radii_km": [0.05], "theta_grid": [0.5]}})

    def test_bad_bounds(self):
        spec = _energy_spec([0.5])
        spec["sweep"]["r_bounds_km"] = [0.2, 0.1]
        with pytest.raises(SpecError, match="r_bounds_km"):
            ExperimentSpec.from_mapping(spec)

    def test_label_sanitized(self):
        spec = ExperimentSpec.from_mapping(
            _scmp_spec(label="my exp/1: final"))
        assert spec.label == "my-exp-1--final"

    def test_db_threshold_conversion(self):
        raw = _scmp_spec()
        raw["network"]["sir_threshold_ul_db"] = 10.0
        spec = ExperimentSpec.from_mapping(raw)
        net = _network_for(spec)
        assert net.sir_threshold_ul == pytest.approx(10.0)

    def test_resolved_round_trips(self):
        spec = ExperimentSpec.from_mapping(_scmp_spec())
        again = ExperimentSpec.from_mapping(spec.resolved())
        assert again == spec

    def test_grid_ordering(self):
        spec = ExperimentSpec.from_mapping({
            "kind": "secp_surface",
            "compute": {"type_probs": [1.0], "mu_c": [MU_C[1]],
                        "mu_m": [MU_M[1]]},
            "sweep": {"radii_km": [0.04, 0.08], "theta_grid": [0.2, 0.8]}})
        pts = _points(spec)
        assert [(p["R"], p["theta"]) for p in pts] == [
            (0.04, 0.2), (0.04, 0.8), (0.08, 0.2), (0.08, 0.8)]


class TestLoadSpec:
    def test_neither_given(self):
        with pytest.raises(SpecError, match="spec file"):
            _load_spec(None, None, None, None)

    def test_unknown_preset(self):
        with pytest.raises(SpecError, match="unknown preset"):
            _load_spec(None, "nope", None, None)

    def test_file_overrides_preset(self, tmp_path):
        p = tmp_path / "override.json"
        p.write_text(json.dumps({"sweep": {"radii_km": [0.05]},
                                 "sim": {"replications": 50}}))
        spec = _load_spec(str(p), "scmp-sweep", None, None)
        assert spec.sweep["radii_km"] == [0.05]
        assert spec.replications == 50
        # untouched preset keys survive the merge
        assert spec.network["lambda_b"] == 400.0

    def test_cli_flags_override_file(self, tmp_path):
        p = tmp_path / "s.json"
        p.write_text(json.dumps(_scmp_spec()))
        spec = _load_spec(str(p), None, 99, 7)
        assert spec.seed == 99
        assert spec.replications == 7

    def test_bad_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(SpecError, match="valid JSON"):
            _load_spec(str(p), None, None, None)


class TestRunExperiment:
    def test_ok_run_artifacts(self, tmp_path):
        spec = ExperimentSpec.from_mapping(_scmp_spec())
        code = run_experiment(spec, out_dir=str(tmp_path))
        assert code == EXIT_OK
        raw = (tmp_path / "tiny.csv").read_bytes()
        assert b"\r\n" in raw
        lines = raw.decode("utf-8").strip().split("\r\n")
        assert lines[0].split(",") == COLUMNS["scmp_vs_R"]
        assert len(lines) == 3
        manifest = json.loads((tmp_path / "tiny.manifest.json").read_text())
        assert manifest["schema_version"] == 1
        assert manifest["status"] == "ok"
        assert manifest["error"] is None
        assert manifest["exit_code"] == 0
        assert manifest["rows_written"] == 2
        assert manifest["output_csv"] == "tiny.csv"
        for lib in ("python", "numpy", "scipy", "cfedge"):
            assert lib in manifest["versions"]

    def test_reruns_byte_identical(self, tmp_path):
        spec = ExperimentSpec.from_mapping(_scmp_spec())
        run_experiment(spec, out_dir=str(tmp_path / "a"))
        run_experiment(spec, out_dir=str(tmp_path / "b"))
        run_experiment(spec, out_dir=str(tmp_path / "c"), workers=2)
        a = (tmp_path / "a" / "tiny.csv").read_bytes()
        assert a == (tmp_path / "b" / "tiny.csv").read_bytes()
        assert a == (tmp_path / "c" / "tiny.csv").read_bytes()

    def test_all_infeasible_is_exit_3(self, tmp_path):
        spec = ExperimentSpec.from_mapping(_energy_spec([0.97]))
        code = run_experiment(spec, out_dir=str(tmp_path))
        assert code == EXIT_INFEASIBLE
        manifest = json.loads((tmp_path / "e.manifest.json").read_text())
        assert manifest["status"] == "failed"
        assert manifest["error"]["type"] == "InfeasibilityError"
        rows = (tmp_path / "e.csv").read_bytes().decode().strip().split("\r\n")
        assert len(rows) == 2
        assert "nan" in rows[1]

    def test_partial_infeasible_is_data(self, tmp_path):
        spec = ExperimentSpec.from_mapping(_energy_spec([0.5, 0.97]))
        code = run_experiment(spec, out_dir=str(tmp_path))
        assert code == EXIT_OK
        rows = (tmp_path / "e.csv").read_bytes().decode().strip().split("\r\n")
        assert len(rows) == 3
        assert "nan" not in rows[1]
        assert "nan" in rows[2]

    def test_numerical_failure_is_exit_4(self, tmp_path, monkeypatch):
        def boom(spec, index, point):
            raise NumericalError("synthetic blowup")

        monkeypatch.setitem(cli._EVALUATORS, "scmp_vs_R", boom)
        spec = ExperimentSpec.from_mapping(_scmp_spec())
        code = run_experiment(spec, out_dir=str(tmp_path))
        assert code == EXIT_NUMERICAL
        assert not (tmp_path / "tiny.csv").exists()
        manifest = json.loads((tmp_path / "tiny.manifest.json").read_text())
        assert manifest["error"]["type"] == "NumericalError"
        assert manifest["output_csv"] is None

    def test_failed_validate_rows_still_exit_0(self, tmp_path, monkeypatch):
        def stub(spec, index, point):
            return {"check": "stub", "value_analytic": 0.0,
                    "value_oracle": 1.0, "delta": 1.0, "tol": 0.5,
                    "status": "fail"}

        monkeypatch.setitem(cli._EVALUATORS, "validate", stub)
        spec = ExperimentSpec.from_mapping({
            "kind": "validate",
            "compute": {"type_probs": [1.0], "mu_c": [MU_C[1]],
                        "mu_m": [MU_M[1]]},
            "sweep": {"radii_km": [0.04]}})
        code = run_experiment(spec, out_dir=str(tmp_path))
        assert code == EXIT_OK
        manifest = json.loads(
            (tmp_path / "validate.manifest.json").read_text())
        assert manifest["checks_failed"] == manifest["rows_written"] > 0


class TestMain:
    def test_usage_error(self, capsys):
        assert cli.main(["run"]) == EXIT_USAGE
        assert "spec file" in capsys.readouterr().err

    def test_unknown_preset(self, capsys):
        assert cli.main(["run", "--preset", "nope"]) == EXIT_USAGE
        assert "unknown preset" in capsys.readouterr().err

    def test_ok_path(self, tmp_path, capsys):
        p = tmp_path / "s.json"
        p.write_text(json.dumps(_scmp_spec()))
        code = cli.main(["run", str(p), "--out", str(tmp_path), "--reps",
                         "100"])
        assert code == EXIT_OK
        assert "tiny: ok" in capsys.readouterr().out
        assert (tmp_path / "tiny.csv").exists()


def test_format_cell_types():
    assert cli._format_cell("pass") == "pass"
    assert cli._format_cell(True) == "1"
    assert cli._format_cell(np.int64(4)) == "4"
    assert cli._format_cell(0.25) == "0.25"
    assert cli._format_cell(float("nan")) == "nan"
