"""Desk-scale comparative runs. Minutes to hours each; run with ``pytest -m slow``."""

import numpy as np
import pytest

from fgsfrql.models.config import TrainConfig
from fgsfrql.models.constants import Algorithm
from fgsfrql.trainer import measure_overhead, train

pytestmark = pytest.mark.slow


def final_eval_mean(algorithm, seed, env="four_rooms", **overrides):
    record = train(TrainConfig.for_env(env, algorithm=algorithm, seed=seed, **overrides))
    return float(np.mean([e.mean for e in record.evaluations]))


def total_training_reward(algorithm, seed, **overrides):
    record = train(TrainConfig.for_env("four_rooms", algorithm=algorithm, seed=seed, **overrides))
    return sum(row.reward for row in record.rows)


def test_full_gradient_transfers_better_on_four_rooms():
    seeds = range(5)
    fg = np.array([final_eval_mean(Algorithm.FG_SFDQN_ALG1, s) for s in seeds])
    assert fg.mean() > 0.0
    for baseline in (Algorithm.SFDQN, Algorithm.DQN):
        other = np.array([final_eval_mean(baseline, s) for s in seeds])
        assert fg.mean() > other.mean()
        assert np.sum(fg > other) >= 4


@pytest.mark.parametrize("n", [5, 10, 20])
def test_averaging_lowers_training_reward(n):
    seeds = range(3)
    online = np.mean([total_training_reward(Algorithm.FG_SFDQN_ALG1, s) for s in seeds])
    averaged = np.mean([total_training_reward(Algorithm.FG_SFDQN_ALG3, s, averaging_n=n) for s in seeds])
    assert online > averaged


def test_update_cost_ordering():
    cfg = TrainConfig.for_env("four_rooms", averaging_n=5)
    stats = measure_overhead(cfg, n_steps=300)
    assert stats[Algorithm.FG_SFDQN_ALG3].skipped == 0
    assert stats[Algorithm.DQN].mean_ms < stats[Algorithm.FGDQN].mean_ms < stats[Algorithm.SFDQN].mean_ms
    for algorithm in (Algorithm.FG_SFDQN_ALG1, Algorithm.FG_SFDQN_ALG2, Algorithm.FG_SFDQN_ALG3):
        assert stats[Algorithm.SFDQN].mean_ms < stats[algorithm].mean_ms


def test_point_maze_transfer_smoke():
    seeds = range(3)
    fg = np.mean([final_eval_mean(Algorithm.FG_SFDQN_ALG1, s, env="point_maze_u", steps_per_task=5000)
                  for s in seeds])
    sf = np.mean([final_eval_mean(Algorithm.SFDQN, s, env="point_maze_u", steps_per_task=5000)
                  for s in seeds])
    assert fg >= sf
