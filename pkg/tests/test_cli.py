import json
from pathlib import Path

import numpy as np
import pytest

from roughscale.cli import main, read_config_file
from roughscale.dataio import save_library_csv

from .test_experiments import toy_library


def run(*argv) -> int:
    return main(list(argv))


def read_bytes_map(directory, skip=("manifest.json",)):
    out = {}
    for path in sorted(Path(directory).rglob("*")):
        if path.is_file() and path.name not in skip:
            out[path.relative_to(directory)] = path.read_bytes()
    return out


class TestSimulate:
    def test_writes_full_grid_rows(self, tmp_path):
        out = tmp_path / "sim"
        code = run("simulate", "--hurst", "0.1", "--eta", "1.9", "--xi0", "0.1",
                   "--lambda", "0", "--steps", "5000", "--paths", "1",
                   "--seed", "7", "--out", str(out))
        assert code == 0
        lines = (out / "path_0000.csv").read_text().splitlines()
        assert len(lines) == 5002  # header + 5001 grid points
        assert (out / "manifest.json").exists()

    def test_domain_error_exits_one(self, tmp_path, capsys):
        code = run("simulate", "--hurst", "1.5", "--out", str(tmp_path / "x"))
        assert code == 1
        assert "hurst" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path):
        args = ("simulate", "--hurst", "0.2", "--steps", "300", "--paths", "2",
                "--seed", "9")
        assert run(*args, "--out", str(tmp_path / "a")) == 0
        assert run(*args, "--out", str(tmp_path / "b")) == 0
        assert read_bytes_map(tmp_path / "a") == read_bytes_map(tmp_path / "b")

    def test_npz_format(self, tmp_path):
        out = tmp_path / "sim"
        assert run("simulate", "--hurst", "0.2", "--steps", "100",
                   "--format", "npz", "--out", str(out)) == 0
        assert (out / "path_0000.npz").exists()
        assert not (out / "path_0000.csv").exists()


class TestEstimate:
    def test_brownian_price_file(self, tmp_path, capsys):
        sim_out = tmp_path / "sim"
        run("simulate", "--hurst", "0.5", "--eta", "0", "--xi0", "0.04",
            "--steps", "5000", "--seed", "12", "--out", str(sim_out))
        est_out = tmp_path / "est"
        code = run("estimate", "--input", str(sim_out / "path_0000.csv"),
                   "--tau-max", "500", "--out", str(est_out))
        assert code == 0
        report = json.loads((est_out / "report.json").read_text())
        assert 0.45 < report["hurst"] < 0.55
        assert report["proxy_pvalue"] > 0.05
        assert report["tau_max_used"] == 500
        stdout = capsys.readouterr().out
        assert "tau_max 500" in stdout

    def test_acsr_tau_selection_echoed(self, tmp_path, capsys):
        sim_out = tmp_path / "sim"
        run("simulate", "--hurst", "0.1", "--steps", "3000", "--seed", "3",
            "--out", str(sim_out))
        est_out = tmp_path / "est"
        code = run("estimate", "--input", str(sim_out / "path_0000.csv"),
                   "--tau-max", "acsr", "--out", str(est_out))
        assert code == 0
        echoed = [line for line in capsys.readouterr().out.splitlines()
                  if line.startswith("tau_max ")]
        tau = int(echoed[0].split()[1])
        assert 5 <= tau <= 3000 // 4

    def test_missing_input_exits_two(self, tmp_path, capsys):
        code = run("estimate", "--input", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "est"))
        assert code == 2

    def test_bad_tau_insufficient_data_exits_two(self, tmp_path):
        sim_out = tmp_path / "sim"
        run("simulate", "--hurst", "0.3", "--steps", "200", "--seed", "1",
            "--out", str(sim_out))
        code = run("estimate", "--input", str(sim_out / "path_0000.csv"),
                   "--tau-max", "150", "--out", str(tmp_path / "est"))
        assert code == 2


class TestExperimentCli:
    GRID_ARGS = (
        "experiment", "grid", "--h-min", "0.1", "--h-max", "0.3",
        "--h-step", "0.2", "--lambda-min", "-0.5", "--lambda-max", "0.5",
        "--lambda-step", "1.0", "--replications", "2", "--steps", "1200",
        "--tau-max", "100", "--seed", "4",
    )

    def test_grid_outputs(self, tmp_path):
        out = tmp_path / "grid"
        assert run(*self.GRID_ARGS, "--out", str(out)) == 0
        for name in ("grid.csv", "heatmap_b_price.csv", "heatmap_b_price.svg",
                     "buckets.csv", "buckets.svg", "manifest.json"):
            assert (out / name).exists(), name
        lines = (out / "grid.csv").read_text().splitlines()
        assert len(lines) == 1 + 2 * 2 * 2

    def test_workers_do_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "w1", tmp_path / "w8"
        assert run(*self.GRID_ARGS, "--workers", "1", "--out", str(a)) == 0
        assert run(*self.GRID_ARGS, "--workers", "8", "--out", str(b)) == 0
        assert read_bytes_map(a) == read_bytes_map(b)

    def test_rerun_from_manifest(self, tmp_path):
        first = tmp_path / "first"
        assert run(*self.GRID_ARGS, "--out", str(first)) == 0
        again = tmp_path / "again"
        assert run("rerun", "--manifest", str(first / "manifest.json"),
                   "--out", str(again)) == 0
        assert read_bytes_map(first) == read_bytes_map(again)

    def test_config_file_and_flag_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# tiny run\nh_min = 0.1\nh_max = 0.1\nh_step = 0.1\n"
            "lambda_min = 0\nlambda_max = 0\nlambda_step = 0.5\n"
            "replications = 2\nsteps = 1200\ntau_max = 100\n"
        )
        out = tmp_path / "out"
        assert run("experiment", "grid", "--config", str(cfg),
                   "--replications", "1", "--out", str(out)) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["replications"] == 1  # flag wins
        assert manifest["config"]["steps"] == 1200  # config wins over preset
        lines = (out / "grid.csv").read_text().splitlines()
        assert len(lines) == 2

    def test_unknown_config_key_exits_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("laambda_min = 0\n")
        assert run("experiment", "grid", "--config", str(cfg),
                   "--out", str(tmp_path / "o")) == 1

    def test_empirical_h_runs(self, tmp_path):
        out = tmp_path / "emp"
        calib = tmp_path / "calib.csv"
        calib.write_text(
            "symbol,tau_star,h_vol\nA,100,0.08\nB,100,0.10\nC,100,0.12\n"
            "D,100,0.09\nE,100,0.11\n"
        )
        code = run("experiment", "empirical-h", "--lambdas=-0.4,0.4",
                   "--replications", "2", "--steps", "1200",
                   "--calibration", str(calib), "--out", str(out))
        assert code == 0
        lines = (out / "empirical.csv").read_text().splitlines()
        assert len(lines) == 3
        assert (out / "curves.svg").exists()

    def test_bad_calibration_schema_exits_two(self, tmp_path):
        calib = tmp_path / "calib.csv"
        calib.write_text("symbol,tau\nA,100\n")
        code = run("experiment", "empirical-h", "--calibration", str(calib),
                   "--out", str(tmp_path / "emp"))
        assert code == 2

    def test_real_data_requires_data_flag(self, tmp_path):
        assert run("experiment", "real-data", "--out", str(tmp_path / "o")) == 1

    def test_real_data_pipeline_outputs(self, tmp_path):
        lib_path = tmp_path / "library.csv"
        save_library_csv(toy_library(n_steps=1500), lib_path)
        out = tmp_path / "real"
        code = run("experiment", "real-data", "--data", str(lib_path),
                   "--proxy-test", "line-fit", "--out", str(out))
        assert code == 0
        table = (out / "table.csv").read_text().splitlines()
        assert table[0] == "symbol,tau_star,h_price,b_price,h_vol,b_vol"
        assert len(table) == 6
        dep = json.loads((out / "dependence.json").read_text())
        assert "dependence" in dep and "intersection" in dep
        assert (out / "scatter.svg").exists()


class TestConfigParser:
    def test_values_and_lists(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("a = 1\nb = text\nc = 0.5, 1.5\n# comment\nd = true\n")
        parsed = read_config_file(cfg)
        assert parsed == {"a": 1, "b": "text", "c": [0.5, 1.5], "d": True}

    def test_malformed_line(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("just a line\n")
        with pytest.raises(Exception):
            read_config_file(cfg)


class TestUsage:
    def test_no_command_exits_one(self):
        assert run() == 1

    def test_unknown_flag_exits_one(self):
        assert run("simulate", "--hirst", "0.1", "--out", "/tmp/x") == 1
