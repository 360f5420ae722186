import subprocess
import sys

import pytest

from mg_edge_lab.cli import main, parse_config, parse_sweep
from mg_edge_lab.errors import ConfigurationError
from mg_edge_lab.output import COLUMNS, read_results

FAST = ["--rounds", "600", "--runs", "3", "--seed", "1"]


def write(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestParseConfig:
    def test_file_example(self, tmp_path):
        cfg = parse_config(write(tmp_path, "agents=21\ncutoff=10\npolicy=wsls(p=0.005)\n"))
        assert cfg.game.num_agents == 21 and cfg.game.cutoff == 10
        assert cfg.policy.name == "wsls" and cfg.policy["p"] == 0.005

    def test_even_agents(self, tmp_path):
        with pytest.raises(ConfigurationError, match="agents must be odd") as exc:
            parse_config(write(tmp_path, "agents=20\n"))
        assert exc.value.key == "agents"

    def test_empty_file_gives_defaults(self, tmp_path):
        cfg = parse_config(write(tmp_path, ""))
        assert (cfg.game.num_agents, cfg.game.cutoff, cfg.game.num_rounds, cfg.runs) == (21, 10, 10000, 32)
        assert (cfg.task.tasks_per_round, cfg.task.mean_task_time, cfg.task.deadline) == (50, 1.0, 10.0)
        assert cfg.warmup == 0 and cfg.sweep is None

    def test_comments_and_overrides(self, tmp_path):
        path = write(tmp_path, "# header\nrounds = 500  # short\nruns=4\nsweep-s=1-3\n")
        cfg = parse_config(path, {"runs": 9})
        assert cfg.game.num_rounds == 500 and cfg.runs == 9 and cfg.sweep == (1, 2, 3)

    @pytest.mark.parametrize("text, key", [
        ("speed=3\n", "speed"), ("rounds=many\n", "rounds"), ("cutoff=21\n", "cutoff"),
        ("policy=wsls(p=9)\n", "p"), ("warmup=10000\n", "warmup"), ("deadline=0\n", "task"),
        ("just words\n", "just words"), ("sweep_s=a-b\n", "sweep_s"),
    ])
    def test_errors_name_key(self, tmp_path, text, key):
        with pytest.raises(ConfigurationError) as exc:
            parse_config(write(tmp_path, text))
        assert exc.value.key == key

    def test_parse_sweep(self):
        assert parse_sweep("1-3,5") == (1, 2, 3, 5)
        assert parse_sweep("none") is None


class TestCommands:
    def test_run_deterministic_bytes(self, tmp_path):
        for sub in ("a", "b"):
            assert main(["run", "--policy", "random", *FAST, "--out", str(tmp_path / sub)]) == 0
        assert (tmp_path / "a/results.csv").read_bytes() == (tmp_path / "b/results.csv").read_bytes()

    def test_csv_schema_and_metadata(self, tmp_path):
        main(["run", "--policy", "wsls(p=0.005)", *FAST, "--warmup", "100", "--out", str(tmp_path)])
        meta, rows = read_results(tmp_path / "results.csv")
        header = [l for l in (tmp_path / "results.csv").read_text().splitlines() if not l.startswith("#")][0]
        assert header.split(",") == list(COLUMNS)
        for key in ("agents", "cutoff", "rounds", "runs", "seed", "warmup", "tasks_per_round",
                    "mean_task_time", "deadline", "task_distribution", "policy", "reward", "sweep_s"):
            assert key in meta
        assert meta["policy"] == ["wsls(p=0.005)"]
        assert [r["run_index"] for r in rows] == ["0", "1", "2", "agg"]
        assert all(r["alpha"] == "na" and r["warmup"] == "100" for r in rows)

    def test_csv_roundtrip(self, tmp_path):
        from mg_edge_lab.harness import run_experiment
        from mg_edge_lab.output import fmt

        cfg = parse_config(None, {"policy": "qlearn-action", "rounds": 600, "runs": 3})
        main(["run", "--policy", "qlearn-action", *FAST, "--out", str(tmp_path)])
        _, rows = read_results(tmp_path / "results.csv")
        point = run_experiment(cfg).points[0]
        for r, row in zip(point.runs, rows):
            assert row["volatility"] == float(fmt(r.volatility))
            assert row["qoe_prob"] == float(fmt(r.qoe_probability))
            assert row["avg_utility"] == pytest.approx(r.mean_utility, rel=1e-5)
        agg = rows[-1]
        assert agg["volatility"] == pytest.approx(sum(x["volatility"] for x in rows[:-1]) / 3, rel=1e-5)

    def test_sweep_rows(self, tmp_path):
        assert main(["sweep", "--policy", "seminal", "--sweep-s", "1-3", *FAST, "--out", str(tmp_path)]) == 0
        _, rows = read_results(tmp_path / "results.csv")
        assert {r["experiment_id"] for r in rows} == {"seminal-s1", "seminal-s2", "seminal-s3"}
        assert {r["alpha"] for r in rows} == {"0.0952381", "0.190476", "0.380952"}

    def test_sweep_memoryless_flagged(self, tmp_path):
        main(["sweep", "--policy", "wsls", "--sweep-s", "1,2", *FAST, "--out", str(tmp_path)])
        _, rows = read_results(tmp_path / "results.csv")
        assert {r["experiment_id"] for r in rows} == {"wsls-flat"}
        agg = [r for r in rows if r["run_index"] == "agg"]
        assert len(agg) == 2 and agg[0]["volatility"] == agg[1]["volatility"]

    def test_compare_all_policies_with_plots(self, tmp_path, capsys):
        code = main(["compare", "--rounds", "300", "--runs", "2", "--sweep-s", "2,3",
                     "--plot", "--out", str(tmp_path)])
        assert code == 0
        _, rows = read_results(tmp_path / "results.csv")
        names = {r["experiment_id"].rsplit("-", 1)[0] for r in rows}
        assert names == {"seminal", "exponential", "qlearn-action", "qlearn-strategy", "adaptive",
                         "wsls", "rotherev", "automata", "random"}
        for fig in ("volatility_vs_alpha.svg", "utility_by_policy.svg", "qoe_by_policy.svg"):
            text = (tmp_path / fig).read_text()
            assert text.lstrip().startswith("<?xml") and "<svg" in text
            assert "agents=21" in text  # configuration embedded in metadata
            assert "<image" not in text
        assert "rank" in capsys.readouterr().out

    def test_run_plot_without_sweep(self, tmp_path):
        main(["run", "--policy", "rotherev", *FAST, "--plot", "--out", str(tmp_path)])
        assert (tmp_path / "volatility_by_policy.svg").exists()

    def test_selftest(self, tmp_path, capsys):
        assert main(["selftest", "--out", str(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert out.count("PASS") == 5 and "FAIL" not in out


class TestExitCodes:
    def test_unknown_policy(self, tmp_path, capsys):
        assert main(["run", "--policy", "genetic", "--out", str(tmp_path)]) == 2
        assert "usage" in capsys.readouterr().err

    def test_even_agents(self, tmp_path):
        assert main(["run", "--agents", "20", "--out", str(tmp_path)]) == 2

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--colour", "red"])
        assert exc.value.code == 2

    def test_missing_config(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["run", *FAST, "--out", str(blocker / "sub")]) == 1


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "mg_edge_lab.cli", "run", "--policy", "random",
                          *FAST, "--out", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "results.csv").exists()
