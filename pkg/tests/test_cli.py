import csv
import json

import numpy as np
import pytest

from looplab.cli import curve_from_config, main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path / "runs"), "--quiet"])


def run_dirs(tmp_path):
    return sorted((tmp_path / "runs").iterdir())


def write_config(tmp_path, payload):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload))
    return str(path)


class TestCurveFromConfig:
    def test_shorthand_strings(self):
        assert np.allclose(np.abs(curve_from_config("circle").vertices), 1.0)
        assert np.allclose(np.abs(curve_from_config("circle:2.5").vertices),
                           2.5)

    def test_cosine_record(self):
        curve = curve_from_config({"variant": "cosine", "amplitude": 0.2,
                                   "mode": 3, "n": 256})
        assert len(curve.vertices) == 256

    def test_image_record(self):
        curve = curve_from_config({
            "variant": "image",
            "base": {"variant": "circle", "n": 256},
            "map": {"variant": "quadratic", "c": [0.1, 0.0]},
        })
        assert not np.allclose(np.abs(curve.vertices), 1.0)


class TestExitCodes:
    def test_unknown_command_is_usage_error(self, tmp_path):
        assert run(tmp_path, "frobnicate") == 2

    def test_missing_config_key_is_usage_error(self, tmp_path):
        cfg = write_config(tmp_path, {})
        assert run(tmp_path, "mass", "--config", cfg) == 2

    def test_invalid_json_is_usage_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ nope")
        assert run(tmp_path, "mass", "--config", str(path)) == 2

    def test_missing_file_is_usage_error(self, tmp_path):
        assert run(tmp_path, "mass", "--config", "/no/such/file.json") == 2


class TestMassCommand:
    def test_loop_mass_run(self, tmp_path):
        cfg = write_config(tmp_path, {
            "domain": {"box": {"x0": 0, "x1": 2, "y0": 0, "y1": 2}},
            "mesh": 0.25,
        })
        assert run(tmp_path, "mass", "--config", cfg) == 0
        (run_dir,) = run_dirs(tmp_path)
        record = json.loads((run_dir / "record.json").read_text())
        assert record["command"] == "mass"
        assert record["results"][0]["kind"] == "loop"
        assert record["results"][0]["value"] > 0
        assert record["version"].startswith("looplab ")

    def test_hitting_mass_run(self, tmp_path):
        cfg = write_config(tmp_path, {
            "domain": {"disk": {"radius": 3.0}},
            "v1": {"disk": {"center": [-1.0, 0.0], "radius": 0.4}},
            "v2": {"disk": {"center": [1.0, 0.0], "radius": 0.4}},
            "mesh": 0.25,
        })
        assert run(tmp_path, "mass", "--config", cfg) == 0
        (run_dir,) = run_dirs(tmp_path)
        results = [json.loads(line) for line in
                   (run_dir / "results.jsonl").read_text().splitlines()]
        assert results[0]["kind"] == "hitting"

    def test_mesh_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path, {
            "domain": {"box": {"x0": 0, "x1": 1, "y0": 0, "y1": 1}},
            "mesh": 0.25,
        })
        assert run(tmp_path, "mass", "--config", cfg, "--mesh", "1/2") == 0
        (run_dir,) = run_dirs(tmp_path)
        record = json.loads((run_dir / "record.json").read_text())
        assert record["results"][0]["mesh"] == 0.5


class TestEnergyCommand:
    def test_circle_energy_with_csv(self, tmp_path):
        assert run(tmp_path, "energy", "--curve", "circle") == 0
        (run_dir,) = run_dirs(tmp_path)
        with open(run_dir / "energy.csv") as fh:
            rows = list(csv.DictReader(fh))
        routes = {row["route"] for row in rows}
        assert routes == {"rooted", "disk_formula"}
        assert all(abs(float(row["value"])) < 0.05 for row in rows)


class TestVerifyCommand:
    def test_restriction_pass_exit_zero(self, tmp_path):
        cfg = write_config(tmp_path, {
            "k": {"disk": {"radius": 0.3}},
            "dprime": {"disk": {"radius": 1.0}},
            "d": {"disk": {"radius": 2.0}},
            "meshes": [1 / 8, 1 / 16],
        })
        code = run(tmp_path, "verify", "--config", cfg,
                   "--identity", "restriction")
        assert code == 0
        (run_dir,) = run_dirs(tmp_path)
        results = [json.loads(line) for line in
                   (run_dir / "results.jsonl").read_text().splitlines()]
        assert results[0]["verdict"] == "pass"

    def test_unknown_identity_is_usage_error(self, tmp_path):
        assert run(tmp_path, "verify", "--identity", "pigeonhole") == 2


class TestBrownianCommand:
    def test_zero_path_ratio_csv(self, tmp_path):
        cfg = write_config(tmp_path, {
            "phi": [0.0, 0.0, 0.0],
            "kappa": 1.0,
            "eps_schedule": [0.4],
            "samples": 2000,
        })
        assert run(tmp_path, "brownian-om", "--config", cfg) == 0
        (run_dir,) = run_dirs(tmp_path)
        with open(run_dir / "tube_ratios.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert float(rows[0]["ratio"]) == 1.0


class TestRunDirectories:
    def test_runs_never_clobbered(self, tmp_path):
        cfg = write_config(tmp_path, {
            "domain": {"box": {"x0": 0, "x1": 1, "y0": 0, "y1": 1}},
            "mesh": 0.5,
        })
        assert run(tmp_path, "mass", "--config", cfg) == 0
        assert run(tmp_path, "mass", "--config", cfg) == 0
        names = [d.name for d in run_dirs(tmp_path)]
        assert names == ["mass-0000", "mass-0001"]
