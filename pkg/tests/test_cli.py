import json
from pathlib import Path

import pytest

from pressvote.cli import main

MINIMAL = {"num_voters": 4, "num_candidates": 10, "k_supernodes": 2,
           "rounds": 5, "seed": 3}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(MINIMAL))
    return str(path)


def run(argv):
    return main(argv)


class TestSimulate:
    def test_smoke_outputs(self, config_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert run(["simulate", "--config", config_file, "--out-dir", str(out)]) == 0
        for name in ("rewards.csv", "elections.csv", "trust.csv", "manifest.json"):
            assert (out / name).exists()
        rewards = (out / "rewards.csv").read_text().splitlines()
        assert rewards[0] == "round,voter,stake,cumulative_reward"
        assert len(rewards) == 1 + 5 * 4
        elections = (out / "elections.csv").read_text().splitlines()
        assert len(elections) == 1 + 5 * 10
        manifest = json.loads((out / "manifest.json").read_text())
        assert sorted(manifest["outputs"]) == ["elections.csv", "rewards.csv",
                                               "trust.csv"]
        assert manifest["config"]["seed"] == 3

    def test_byte_identical_reruns(self, config_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run(["simulate", "--config", config_file, "--out-dir", str(out1)])
        run(["simulate", "--config", config_file, "--out-dir", str(out2)])
        for name in ("rewards.csv", "elections.csv", "trust.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_seed_override_changes_output(self, config_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run(["simulate", "--config", config_file, "--out-dir", str(out1)])
        run(["simulate", "--config", config_file, "--out-dir", str(out2),
             "--seed", "99"])
        manifest = json.loads((out2 / "manifest.json").read_text())
        assert manifest["config"]["seed"] == 99

    def test_invalid_config_exit_2(self, tmp_path, capsys):
        bad = dict(MINIMAL, k_supernodes=50)
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        assert run(["simulate", "--config", str(path),
                    "--out-dir", str(tmp_path)]) == 2
        assert "k_supernodes exceeds num_candidates" in capsys.readouterr().err

    def test_missing_config_exit_2(self, tmp_path):
        assert run(["simulate", "--config", str(tmp_path / "nope.json"),
                    "--out-dir", str(tmp_path)]) == 2

    def test_malformed_json_exit_2(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert run(["simulate", "--config", str(path),
                    "--out-dir", str(tmp_path)]) == 2
        assert "line 1" in capsys.readouterr().err


class TestLdp:
    def test_valve_value(self, capsys):
        assert run(["ldp", "valve", "--epsilon", "0.1",
                    "--lambda", "2", "--Lambda", "1"]) == 0
        out = capsys.readouterr().out
        assert "3.3219" in out

    def test_merit_trivial(self, capsys):
        assert run(["ldp", "merit", "--epsilon", "1",
                    "--Lambda", "0.5", "--L", "3"]) == 0
        assert "0.5" in capsys.readouterr().out

    def test_rate_zero(self, capsys):
        assert run(["ldp", "rate", "--b", "0",
                    "--lambda", "2", "--Lambda", "1"]) == 0
        assert "0.0" in capsys.readouterr().out

    def test_unstable_rates_exit_2(self, capsys):
        assert run(["ldp", "rate", "--b", "1",
                    "--lambda", "1", "--Lambda", "2"]) == 2
        assert "stability requires lambda > Lambda" in capsys.readouterr().err

    def test_mc_small(self, capsys):
        assert run(["ldp", "mc", "--lambda", "2", "--Lambda", "1", "--L", "-1",
                    "--horizon", "50", "--replicas", "1000", "--seed", "1"]) == 0
        assert "p = 1.0" in capsys.readouterr().out

    def test_decay_insufficient_replicas_exit_3(self, capsys):
        assert run(["ldp", "decay", "--lambda", "2", "--Lambda", "1", "--b", "5",
                    "--l-values", "4,8", "--horizon", "100",
                    "--replicas", "100", "--seed", "0"]) == 3


class TestIcCheck:
    def test_log_form_passes(self, capsys):
        assert run(["ic-check", "--alpha", "0.5", "--form", "logarithmic"]) == 0
        assert "passed" in capsys.readouterr().out

    def test_quadratic_passes(self):
        assert run(["ic-check", "--alpha", "0.5", "--form", "quadratic"]) == 0

    def test_coarse_grid_rejected(self, capsys):
        assert run(["ic-check", "--grid", "0.5"]) == 2


class TestReproduce:
    def test_unknown_target_exit_2(self, capsys):
        assert run(["reproduce", "fig99", "--out-dir", "/tmp"]) == 2
        assert "valid targets" in capsys.readouterr().err

    def test_fig3_csv(self, tmp_path):
        assert run(["reproduce", "fig3", "--out-dir", str(tmp_path)]) == 0
        lines = (tmp_path / "fig3.csv").read_text().splitlines()
        assert lines[0] == "epsilon,lambda,Lambda,L_star"
        assert len(lines) > 100

    def test_fig8_writes_summary(self, tmp_path, capsys):
        assert run(["reproduce", "fig8", "--out-dir", str(tmp_path)]) == 0
        assert (tmp_path / "fig8_elections.csv").exists()
        assert (tmp_path / "fig8_rewards.csv").exists()
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert "agreement" in manifest["summary"]
        assert "pass = True" in capsys.readouterr().out

    def test_reproduce_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(["reproduce", "table1", "--out-dir", str(a)])
        run(["reproduce", "table1", "--out-dir", str(b)])
        assert (a / "table1.csv").read_bytes() == (b / "table1.csv").read_bytes()
