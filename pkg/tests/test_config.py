import pytest

from fgsfrql.errors import ConfigurationError
from fgsfrql.models.config import TrainConfig


def test_env_defaults():
    cfg = TrainConfig.for_env("point_maze_u", algorithm="sfdqn")
    assert (cfg.steps_per_task, cfg.num_tasks, cfg.batch_size, cfg.hidden) == (30000, 8, 512, (128, 128))
    rooms = TrainConfig.for_env("four_rooms")
    assert (rooms.steps_per_task, rooms.num_tasks, rooms.batch_size) == (10000, 6, 64)
    assert (rooms.gamma, rooms.epsilon, rooms.alpha, rooms.alpha_r, rooms.horizon) == (0.95, 0.6, 0.001, 0.5, 200)
    assert rooms.buffer_capacity == 200000


def test_from_dict_uses_env_defaults_and_overrides():
    cfg = TrainConfig.from_dict({"env": "chain_test", "seed": 3, "hidden": [4, 4]})
    assert cfg.seed == 3
    assert cfg.hidden == (4, 4)
    assert cfg.num_tasks == 3
    assert TrainConfig.from_dict(cfg.json_dict()) == cfg


@pytest.mark.parametrize("values", [
    {"unknown_key": 1},
    {"env": "mujoco"},
    {"algorithm": "ppo"},
    {"gamma": 1.0},
    {"epsilon": 1.5},
    {"alpha": -0.1},
    {"steps_per_task": 0},
    {"seed": -1},
    {"batch_size": 2.5},
    {"lr_schedule": "cosine"},
    {"hidden": [8, 0]},
    {"minibatch": "yes"},
])
def test_invalid_configs(values):
    with pytest.raises(ConfigurationError):
        TrainConfig.from_dict(values)


def test_configuration_errors_are_value_errors():
    with pytest.raises(ValueError):
        TrainConfig.from_dict({"averaging_n": 0})
