"""
Greedy held-out evaluation.

Every task is rolled out for a fixed number of episodes with exploration
off and no learning. Successor feature agents act by GPI over the whole
library with the task's reward model; Q-network agents act greedily on
their single head.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from fgsfrql.environments import Environment, task_reward
from fgsfrql.gpi import gpi_select
from fgsfrql.models.constants import DEFAULT_EVAL_EPISODES, DEFAULT_EVAL_STEP_CAP
from fgsfrql.models.records import TaskEvaluation
from fgsfrql.models.tasks import TaskSpec
from fgsfrql.successor import PolicyLibrary, QNet, RewardModel
from fgsfrql.validators import validate_positive

logger = logging.getLogger(__name__)

_SEED_BOUND = 2 ** 31


def _policy(model, task: TaskSpec):
    if isinstance(model, PolicyLibrary):
        if task.task_id < model.active_count:
            reward = model.reward_models[task.task_id]
        else:
            reward = RewardModel(task.reward_weights)
        return lambda s: gpi_select(model, s, reward).action
    if isinstance(model, QNet):
        return lambda s: int(np.argmax(model.values(s)))
    raise TypeError(f"Cannot evaluate {type(model).__name__}")


def evaluate(model, env: Environment, tasks: Optional[Sequence[TaskSpec]] = None,
             n_episodes: int = DEFAULT_EVAL_EPISODES, step_cap: int = DEFAULT_EVAL_STEP_CAP,
             rng=None) -> List[TaskEvaluation]:
    """Mean and standard deviation of undiscounted greedy returns per task.

    Args:
        model (PolicyLibrary or QNet): Trained agent; never modified
        env (Environment): Environment reserved for evaluation
        tasks (list): Tasks to evaluate; defaults to all of env.tasks
        n_episodes (int): Episodes per task
        step_cap (int): Maximum steps per episode
        rng: numpy Generator drawing episode reset seeds

    Raises:
        ConfigurationError: If n_episodes or step_cap is not positive
    """
    validate_positive("n_episodes", n_episodes)
    validate_positive("step_cap", step_cap)
    rng = rng if rng is not None else np.random.default_rng(0)
    tasks = list(env.tasks if tasks is None else tasks)

    results = []
    for task in tasks:
        act = _policy(model, task)
        env.set_task(task.task_id)
        returns = []
        for _ in range(n_episodes):
            s = env.reset(seed=int(rng.integers(_SEED_BOUND)))
            total = 0.0
            for _ in range(step_cap):
                s, features, terminal = env.step(act(s))
                total += task_reward(task, features)
                if terminal:
                    break
            returns.append(total)
        returns = np.asarray(returns)
        results.append(TaskEvaluation(task.task_id, float(returns.mean()), float(returns.std()),
                                      tuple(float(r) for r in returns)))
        logger.info("Eval task %d: mean %.4f std %.4f over %d episodes",
                    task.task_id, results[-1].mean, results[-1].std, n_episodes)
    return results
