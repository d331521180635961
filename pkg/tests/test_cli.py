"""Command-line surface: subcommands, exit codes, end-to-end reproducibility."""

import numpy as np
import pytest

from stratoflow.cli import cli_main

RUN_TOML = """
[grid]
n1 = 16
n2 = 16
n3 = 8

[eos]
preset = "ideal-monoatomic"
mu0 = 0.05

[solver]
t_final = 0.1
dt_max = 0.01

[ic]
preset = "taylor-green"
amplitude = 1.0

[output]
snapshot_every = 5
"""


@pytest.fixture
def run_config(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(RUN_TOML)
    return cfg


class TestRun:
    def test_missing_config_exits_2(self, capsys):
        assert cli_main(["run", "--config", "missing.toml"]) == 2
        assert "not found" in capsys.readouterr().err

    def test_smoke_run_produces_outputs(self, run_config, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli_main(["run", "--config", str(run_config), "--output", str(out)]) == 0
        assert (out / "diagnostics.csv").exists()
        assert (out / "config.resolved.toml").exists()
        snaps = sorted(out.glob("snapshot_*.bin"))
        assert len(snaps) >= 2
        rows = (out / "diagnostics.csv").read_text().splitlines()
        assert rows[0] == "t,energy,enstrophy,max_vorticity,div_residual,max_velocity"
        energy = np.array([float(r.split(",")[1]) for r in rows[1:]])
        assert np.all(np.diff(energy) <= 1e-8)  # monotone energy column

    def test_echo_reproduces_bitwise(self, run_config, tmp_path):
        out1 = tmp_path / "o1"
        out2 = tmp_path / "o2"
        assert cli_main(["run", "--config", str(run_config), "--output", str(out1), "--quiet"]) == 0
        echo = out1 / "config.resolved.toml"
        assert cli_main(["run", "--config", str(echo), "--output", str(out2), "--quiet"]) == 0
        assert (out1 / "diagnostics.csv").read_bytes() == (out2 / "diagnostics.csv").read_bytes()
        for s1, s2 in zip(sorted(out1.glob("snapshot_*.bin")), sorted(out2.glob("snapshot_*.bin"))):
            assert s1.read_bytes() == s2.read_bytes()


class TestValidateEos:
    def test_ideal_reports_failures_but_exits_zero(self, capsys):
        assert cli_main(["validate-eos", "--preset", "ideal"]) == 0
        out = capsys.readouterr().out
        assert "[FAIL] high_z_limit" in out
        assert "[FAIL] entropy_decay" in out
        assert out.count("[FAIL]") == 2

    def test_compliant_passes(self, capsys):
        assert cli_main(["validate-eos", "--preset", "third-law"]) == 0
        out = capsys.readouterr().out
        assert "[FAIL]" not in out

    def test_no_preset_is_usage_error(self, capsys):
        assert cli_main(["validate-eos"]) == 2


class TestStaticProfile:
    def test_table_to_stdout(self, run_config, capsys):
        assert cli_main(["static-profile", "--config", str(run_config)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 9
        x_last, r_last = map(float, lines[-1].split())
        assert x_last == 1.0
        assert r_last == pytest.approx(np.exp(-1.0), abs=1e-8)

    def test_table_to_file(self, run_config, tmp_path, capsys):
        target = tmp_path / "profile.txt"
        assert cli_main(["static-profile", "--config", str(run_config), "--output", str(target)]) == 0
        data = np.loadtxt(target)
        assert data.shape == (9, 2)


class TestRelEnergy:
    def test_between_snapshots(self, run_config, tmp_path, capsys):
        out = tmp_path / "out"
        assert cli_main(["run", "--config", str(run_config), "--output", str(out), "--quiet"]) == 0
        snaps = sorted(out.glob("snapshot_*.bin"))
        code = cli_main([
            "rel-energy", "--config", str(run_config),
            "--state", str(snaps[-1]), "--reference", str(snaps[0]),
        ])
        assert code == 0
        text = capsys.readouterr().out
        assert "relative energy" in text
        val = float(text.strip().split("=")[-1])
        assert val > 0.0

    def test_self_distance_zero(self, run_config, tmp_path, capsys):
        out = tmp_path / "out"
        cli_main(["run", "--config", str(run_config), "--output", str(out), "--quiet"])
        snap = sorted(out.glob("snapshot_*.bin"))[0]
        cli_main(["rel-energy", "--config", str(run_config),
                  "--state", str(snap), "--reference", str(snap)])
        val = float(capsys.readouterr().out.strip().split("=")[-1])
        assert val == 0.0


class TestStabilityGapCLI:
    def test_emits_csv(self, tmp_path, capsys):
        cfg = tmp_path / "gap.toml"
        cfg.write_text(RUN_TOML + "\n[experiment]\nperturbation_amplitude = 1e-6\n")
        out = tmp_path / "gapout"
        assert cli_main(["stability-gap", "--config", str(cfg), "--output", str(out)]) == 0
        lines = (out / "stability_gap.csv").read_text().splitlines()
        assert lines[0] == "t,D,bound"
        data = np.array([[float(v) for v in row.split(",")] for row in lines[1:]])
        assert np.all(data[:, 1] <= data[:, 2] * (1.0 + 1e-9))


class TestInfo:
    def test_info_with_config(self, run_config, capsys):
        assert cli_main(["info", "--config", str(run_config)]) == 0
        out = capsys.readouterr().out
        assert "stratoflow" in out
        assert "16 x 16 x 8" in out

    def test_unknown_subcommand_exits_2(self):
        assert cli_main(["frobnicate"]) == 2
