"""Builders shared by the test modules."""

import numpy as np

from fgsfrql.client import write_run
from fgsfrql.models.config import TrainConfig
from fgsfrql.models.records import RunRecord, StepRow, TaskEvaluation
from fgsfrql.models.tasks import Transition
from fgsfrql.network import ParamVector, net_init
from fgsfrql.successor import XiNet


def random_xi_net(rng, obs_dim=4, num_actions=3, feature_dim=2, hidden=(5,)):
    layout = (obs_dim, *hidden, num_actions * feature_dim)
    return XiNet(net_init(layout, int(rng.integers(2 ** 31))), num_actions, feature_dim)


def make_transition(rng, obs_dim=4, num_actions=3, feature_dim=2, s=None, a=None,
                    terminal=False, key=b"k", task_id=0):
    return Transition(
        s=rng.normal(size=obs_dim) if s is None else s,
        a=int(rng.integers(num_actions)) if a is None else a,
        r=float(rng.normal()),
        s_next=rng.normal(size=obs_dim),
        features=rng.uniform(0.0, 1.0, size=feature_dim),
        terminal=terminal,
        task_id=task_id,
        pivot_key=key,
    )


def linear_xi_net(xi):
    """XiNet of layout [S, A*d] reproducing a tabular xi[s, a, :] on one-hot states."""
    S, A, d = xi.shape
    weights = xi.reshape(S, A * d).T  # [A*d, S]
    values = np.concatenate([weights.reshape(-1), np.zeros(A * d)])
    return XiNet(ParamVector(values, (S, A * d)), A, d)


def fake_record(algorithm, seed=0, rewards=(0.0, 1.0, 0.0, 1.0), task_ids=(0, 0, 1, 1),
                eval_means=(1.0, 2.0), env="four_rooms", averaging_n=5):
    """RunRecord with hand-made rows and evaluations (no training)."""
    config = TrainConfig.for_env(env, algorithm=algorithm, seed=seed, averaging_n=averaging_n,
                                 num_tasks=len(eval_means))
    cumulative = {}
    rows = []
    for step, (reward, task_id) in enumerate(zip(rewards, task_ids)):
        cumulative[task_id] = cumulative.get(task_id, 0.0) + reward
        rows.append(StepRow(step, task_id, float(reward), cumulative[task_id], 0.5, 0.25, task_id, 0))
    evaluations = [TaskEvaluation(k, float(m), 0.1, (float(m),)) for k, m in enumerate(eval_means)]
    return RunRecord(config, rows, evaluations, {"episodes": 1})


def fake_run_dir(root, name, algorithm, **kwargs):
    return write_run(fake_record(algorithm, **kwargs), root / name)
