import csv

import pytest

from fgsfrql.errors import InputError, UsageError
from fgsfrql.metrics import CSV_COLUMNS, compare_summary, run_label
from fgsfrql.models.constants import Algorithm
from tests.helpers import fake_run_dir


def test_single_algorithm_is_a_usage_error(tmp_path):
    runs = [fake_run_dir(tmp_path, f"sf{s}", "sfdqn", seed=s) for s in range(2)]
    with pytest.raises(UsageError):
        compare_summary(runs)


def test_identical_runs_have_zero_differences(tmp_path):
    runs = [fake_run_dir(tmp_path, "fg", "fg_sfdqn_alg1"), fake_run_dir(tmp_path, "sf", "sfdqn")]
    table = compare_summary(runs)
    assert [s.label for s in table.stats] == ["SFDQN", "SFDQN", "FG-SFDQN", "FG-SFDQN"]
    assert all(d.train_diff == 0.0 and d.eval_diff == 0.0 for d in table.diffs)


def test_statistics_and_difference_sign(tmp_path):
    runs = [
        fake_run_dir(tmp_path, "dqn0", "dqn", seed=0, eval_means=(1.0, 1.0)),
        fake_run_dir(tmp_path, "dqn1", "dqn", seed=1, eval_means=(3.0, 1.0)),
        fake_run_dir(tmp_path, "fg0", "fg_sfdqn_alg1", seed=0, eval_means=(5.0, 1.0), rewards=(1, 1, 0, 0)),
    ]
    table = compare_summary(runs)
    dqn_task0 = next(s for s in table.stats if s.label == "DQN" and s.task_id == 0)
    assert dqn_task0.seeds == 2
    assert dqn_task0.eval_mean == pytest.approx(2.0)
    assert dqn_task0.eval_std == pytest.approx(1.0)
    diff = next(d for d in table.diffs if d.task_id == 0)
    assert (diff.label, diff.other) == ("DQN", "FG-SFDQN")
    assert diff.eval_diff == pytest.approx(-3.0)
    assert diff.train_diff == pytest.approx(1.0 - 2.0)
    assert "DQN - FG-SFDQN" in table.text()


def test_every_algorithm_and_csv(tmp_path):
    runs = [fake_run_dir(tmp_path, algorithm, algorithm) for algorithm in Algorithm.ALL]
    runs.append(fake_run_dir(tmp_path, "alg3-n1", "fg_sfdqn_alg3", averaging_n=1))
    table = compare_summary(runs)
    labels = list(dict.fromkeys(s.label for s in table.stats))
    assert labels == ["DQN", "FG-DQN", "SFDQN", "FG-SFDQN", "FG-SFDQN (alg2)",
                      "FG-SFDQN (alg3) N=1", "FG-SFDQN (alg3) N=5"]
    assert len(table.diffs) == 21 * 2

    path = table.write_csv(tmp_path / "compare.csv")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    kinds = [row[0] for row in rows[1:]]
    assert kinds.count("algorithm") == 14
    assert kinds.count("pairwise") == 42


def test_mismatched_runs_are_input_errors(tmp_path):
    fg = fake_run_dir(tmp_path, "fg", "fg_sfdqn_alg1")
    maze = fake_run_dir(tmp_path, "maze", "sfdqn", env="point_maze_u")
    with pytest.raises(InputError):
        compare_summary([fg, maze])
    three = fake_run_dir(tmp_path, "three", "sfdqn", eval_means=(1.0, 2.0, 3.0))
    with pytest.raises(InputError):
        compare_summary([fg, three])


def test_run_label():
    summary = {"algorithm": "fg_sfdqn_alg3", "config": {"averaging_n": 10}}
    assert run_label(summary) == "FG-SFDQN (alg3) N=10"
    assert run_label({"algorithm": "fgdqn", "config": {}}) == "FG-DQN"
