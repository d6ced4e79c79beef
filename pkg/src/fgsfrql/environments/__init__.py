"""
fg-sfrql - Environments

Multi-task environments with a shared episodic interface:
- FourRooms: object-collection gridworld, binary features
- PointMaze: kinematic point mass, goal-proximity features
- ChainEnv: five-state stochastic chain backing the tabular oracles

The module-level functions are thin wrappers so training code can treat
every environment the same way.
"""

import logging

from fgsfrql.environments.base import Environment, task_reward
from fgsfrql.environments.chain import ChainEnv
from fgsfrql.environments.four_rooms import FourRooms
from fgsfrql.environments.layouts import GridMap, load_grid, parse_grid
from fgsfrql.environments.point_maze import MAZE_MAPS, PointMaze
from fgsfrql.models.constants import DEFAULT_HORIZON, EnvName
from fgsfrql.validators import validate_choice

logger = logging.getLogger(__name__)


def make_env(name: str, layout_seed: int = 0, horizon: int = DEFAULT_HORIZON) -> Environment:
    """Build an environment by selector.

    Args:
        name (str): One of EnvName.ALL
        layout_seed (int): Seed of any layout randomness (four-rooms object placement)
        horizon (int): Maximum episode length

    Raises:
        ConfigurationError: If the name is unknown or the map is malformed

    Example:
        >>> env = make_env("point_maze_u")
        >>> env.num_actions
        9
    """
    validate_choice("env", name, EnvName.ALL)
    if name == EnvName.FOUR_ROOMS:
        env = FourRooms(layout_seed=layout_seed, horizon=horizon)
    elif name in EnvName.MAZES:
        env = PointMaze(MAZE_MAPS[name], horizon=horizon, name=name)
    else:
        env = ChainEnv(horizon=horizon)
    logger.debug("Built %s: obs=%d actions=%d features=%d tasks=%d",
                 name, env.observation_dim, env.num_actions, env.feature_dim, len(env.tasks))
    return env


def env_reset(env: Environment, rng_seed=None):
    """Reset an environment; see Environment.reset."""
    return env.reset(seed=rng_seed)


def env_step(env: Environment, action: int):
    """Step an environment; see Environment.step."""
    return env.step(action)


def feature_of(env: Environment, s, a, s_next):
    """phi(s, a, s_next) for the given environment."""
    return env.feature_of(s, a, s_next)


__all__ = [
    "Environment",
    "FourRooms",
    "PointMaze",
    "ChainEnv",
    "GridMap",
    "load_grid",
    "parse_grid",
    "make_env",
    "env_reset",
    "env_step",
    "task_reward",
    "feature_of",
]
