import numpy as np
import pytest

from fgsfrql.models.config import TrainConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def chain_config():
    """Seconds-scale chain run: three tasks, tiny network."""
    return TrainConfig.for_env(
        "chain_test",
        steps_per_task=40,
        batch_size=8,
        hidden=(8,),
        horizon=25,
        eval_episodes=2,
        eval_step_cap=10,
        buffer_capacity=500,
    )


@pytest.fixture
def results_dir(tmp_path):
    directory = tmp_path / "results"
    directory.mkdir()
    return directory
