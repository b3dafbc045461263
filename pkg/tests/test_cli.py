import json

import pytest

from conbandit.cli import (
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_OK,
    main,
)

STEEP_MU = "0.99,0.98,0.96,0.93,0.90,0.10,0.06,0.04"


def run_args(tmp_path, *extra):
    return ["run", "--env", "gradual", "--policies", "con-ts", "--T", "60",
            "--runs", "2", "--seed", "5", "--out", str(tmp_path), *extra]


class TestExitCodes:
    def test_presets_ok(self, capsys):
        assert main(["presets"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "gradual" in out and "6.0" in out

    def test_bad_tau_is_config_error(self, tmp_path):
        assert main(run_args(tmp_path, "--tau", "1.5")) == EXIT_CONFIG

    def test_unknown_policy_is_config_error(self, tmp_path):
        args = run_args(tmp_path)
        args[args.index("con-ts")] = "bogus"
        assert main(args) == EXIT_CONFIG

    def test_unknown_env_is_config_error(self, tmp_path):
        args = run_args(tmp_path)
        args[args.index("gradual")] = "urban"
        assert main(args) == EXIT_CONFIG

    def test_missing_subcommand_is_config_error(self):
        assert main([]) == EXIT_CONFIG

    def test_lp_solve_infeasible(self):
        assert main(["lp-solve", "--rates", "6,9", "--mu", "0.5,0.3",
                     "--tau", "0.9"]) == EXIT_INFEASIBLE


class TestLpSolve:
    def test_steep_prints_pure_24(self, capsys):
        assert main(["lp-solve", "--mu", STEEP_MU, "--tau", "0.75"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "21.6" in out and "rate 24" in out

    def test_from_file(self, tmp_path, capsys):
        doc = tmp_path / "lp.json"
        doc.write_text(json.dumps({"rates": [6, 54], "mu": [0.9, 0.3], "tau": 0.75}))
        assert main(["lp-solve", "--file", str(doc)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "weight 0.75" in out

    def test_missing_flags(self):
        assert main(["lp-solve", "--tau", "0.5"]) == EXIT_CONFIG


class TestRunOutputs:
    def test_files_written_per_policy(self, tmp_path, capsys):
        args = ["run", "--env", "lossy", "--policies", "con-ts,uts", "--T", "40",
                "--runs", "2", "--seed", "1", "--out", str(tmp_path)]
        assert main(args) == EXIT_OK
        assert (tmp_path / "lossy_con-ts.csv").exists()
        assert (tmp_path / "lossy_uts.csv").exists()
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert set(summary["policies"]) == {"con-ts", "uts"}
        assert "violation" in summary["theorem_bounds"]

    def test_csv_schema(self, tmp_path):
        assert main(run_args(tmp_path)) == EXIT_OK
        lines = (tmp_path / "gradual_con-ts.csv").read_text().splitlines()
        assert lines[0] == ("t,cum_expected_tput_mean,cum_expected_tput_se,"
                            "cum_violation_mean,cum_violation_se,ratio_mean,"
                            "ratio_clamped,cum_regret_mean,cum_regret_se")
        assert len(lines) == 61  # header + one row per interval
        first = lines[1].split(",")
        assert first[0] == "1"
        assert first[6] in ("0", "1")

    def test_ma_columns_with_window(self, tmp_path):
        assert main(run_args(tmp_path, "--window", "20")) == EXIT_OK
        header = (tmp_path / "gradual_con-ts.csv").read_text().splitlines()[0]
        assert header.endswith("ma_tput_mean,ma_violation_mean")

    def test_metadata_round_trip(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        assert main(run_args(out1)) == EXIT_OK
        meta = out1 / "metadata.json"
        assert main(["run", "--config", str(meta), "--out", str(out2)]) == EXIT_OK
        assert (out1 / "gradual_con-ts.csv").read_bytes() == \
            (out2 / "gradual_con-ts.csv").read_bytes()

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "environment": "linear", "policies": ["con-ts"], "T": 30,
            "runs": 2, "base_seed": 2, "tau": 0.75,
            "output_dir": str(tmp_path / "ignored")}))
        out = tmp_path / "real"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        assert (out / "linear_con-ts.csv").exists()

    def test_unknown_config_field(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"environment": "linear", "horizon": 10}))
        assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_nonstationary_run(self, tmp_path):
        args = ["run", "--env", "nonstationary", "--policies", "con-ts",
                "--T", "50", "--runs", "1", "--seed", "3", "--window", "10",
                "--segment-len", "10", "--out", str(tmp_path)]
        assert main(args) == EXIT_OK
        assert (tmp_path / "nonstationary_con-ts.csv").exists()
