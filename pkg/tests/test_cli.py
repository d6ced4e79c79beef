import json

import pytest

from fgsfrql import __version__
from fgsfrql.cli import load_config_file, main
from fgsfrql.errors import ConfigurationError
from fgsfrql.models.records import read_summary
from tests.helpers import fake_run_dir

SMALL = ["--env", "chain_test", "--steps-per-task", "15", "--num-tasks", "2"]


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["train", "--bogus"])
    assert exc.value.code == 2


def test_gradcheck(tmp_path, capsys):
    out = tmp_path / "gradcheck.json"
    assert main(["-q", "gradcheck", "--trials", "5", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True


def test_train_and_eval(tmp_path, capsys):
    run = tmp_path / "run"
    assert main(["-q", "train", *SMALL, "--algo", "sfdqn", "--seed", "3", "--out", str(run)]) == 0
    assert {p.name for p in run.iterdir()} == {"steps.csv", "summary.json", "checkpoint.zip"}
    summary = read_summary(run / "summary.json")
    assert (summary["algorithm"], summary["seed"]) == ("sfdqn", 3)
    assert "task 1" in capsys.readouterr().out

    out = tmp_path / "eval.json"
    code = main(["-q", "eval", str(run / "checkpoint.zip"), "--env", "chain_test",
                 "--episodes", "2", "--step-cap", "5", "--out", str(out)])
    assert code == 0
    assert [e["task_id"] for e in json.loads(out.read_text())] == [0, 1]


def test_yaml_config_with_flag_override(tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("env: chain_test\nsteps-per-task: 12\nnum_tasks: 2\nalgo: dqn\nseed: 1\n")
    run = tmp_path / "run"
    assert main(["-q", "train", "--config", str(config), "--seed", "7", "--out", str(run)]) == 0
    summary = read_summary(run / "summary.json")
    assert summary["seed"] == 7
    assert summary["algorithm"] == "dqn"
    assert summary["config"]["steps_per_task"] == 12


def test_malformed_config_exits_2(tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("env: [chain_test\n")
    assert main(["-q", "train", "--config", str(config)]) == 2
    config.write_text("- just\n- a list\n")
    with pytest.raises(ConfigurationError):
        load_config_file(config)
    assert main(["-q", "train", "--config", str(tmp_path / "missing.yaml")]) == 2


def test_invalid_values_exit_2(tmp_path):
    assert main(["-q", "train", *SMALL, "--gamma", "1.5", "--out", str(tmp_path / "x")]) == 2
    assert not (tmp_path / "x").exists()


def test_compare_and_plot(tmp_path, capsys):
    fg = fake_run_dir(tmp_path, "fg", "fg_sfdqn_alg1")
    sf = fake_run_dir(tmp_path, "sf", "sfdqn")
    assert main(["-q", "compare", str(fg)]) == 2
    out = tmp_path / "compare.csv"
    assert main(["-q", "compare", str(fg), str(sf), "--out", str(out)]) == 0
    assert out.read_text().startswith("kind,label,other")

    assert main(["-q", "plot", "--kind", "cumulative", "--out", str(tmp_path / "none.svg")]) == 2
    assert not (tmp_path / "none.svg").exists()
    colors = tmp_path / "colors.yaml"
    colors.write_text('colors:\n  sfdqn: "#654321"\n')
    svg = tmp_path / "chart.svg"
    assert main(["-q", "plot", str(fg), str(sf), "--kind", "final_eval", "--out", str(svg),
                 "--config", str(colors)]) == 0
    assert "#654321" in svg.read_text()


def test_suite(tmp_path, monkeypatch):
    suite = tmp_path / "suite.yaml"
    suite.write_text(
        "output_dir: out\n"
        "seeds: [0]\n"
        "runs:\n"
        "  - {name: fg, algorithm: fg_sfdqn_alg1, env: chain_test, steps_per_task: 8, eval_episodes: 1}\n"
        "  - {name: sf, algorithm: sfdqn, env: chain_test, steps_per_task: 8, eval_episodes: 1}\n"
        "plots:\n"
        "  - {kind: cumulative, inputs: [fg, sf], out: cumulative.svg}\n"
    )
    assert main(["-q", "suite", str(suite), "--workers", "1"]) == 0
    assert (tmp_path / "out" / "fg-seed0" / "summary.json").is_file()
    assert (tmp_path / "out" / "cumulative.svg").is_file()

    monkeypatch.setenv("FG_SFRQL_THREADS", "many")
    assert main(["-q", "suite", str(suite)]) == 2


def test_overhead(tmp_path):
    out = tmp_path / "overhead.json"
    code = main(["-q", "overhead", "--env", "chain_test", "--n-steps", "2",
                 "--algorithms", "noop", "dqn", "fg_sfdqn_alg3", "--out", str(out)])
    assert code == 0
    rows = json.loads(out.read_text())
    assert [row["algorithm"] for row in rows] == ["noop", "dqn", "fg_sfdqn_alg3"]
    assert all(row["skipped"] == 0 for row in rows)


def test_repeated_train_logs_are_byte_identical(tmp_path):
    for name in ("a", "b"):
        assert main(["-q", "train", *SMALL, "--algo", "fg_sfdqn_alg2", "--out", str(tmp_path / name)]) == 0
    for file_name in ("steps.csv", "summary.json", "checkpoint.zip"):
        assert (tmp_path / "a" / file_name).read_bytes() == (tmp_path / "b" / file_name).read_bytes()
