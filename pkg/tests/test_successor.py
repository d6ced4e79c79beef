import io
import zipfile

import numpy as np
import pytest

from fgsfrql.errors import InputError, ShapeError, UsageError
from fgsfrql.models.tasks import TaskSpec, Transition
from fgsfrql.network import net_init
from fgsfrql.successor import (
    QNet,
    RewardModel,
    load_checkpoint,
    new_library,
    q_from_xi,
    reward_model_update,
    save_checkpoint,
    spawn_task,
    xi_eval,
)
from fgsfrql.tabular import ChainMDP, policy_evaluation, successor_features
from fgsfrql.updates import bellman_residual
from fgsfrql.utils import one_hot
from tests.helpers import linear_xi_net, random_xi_net

GAMMA = 0.9
RIGHT = [1, 1, 1, 1, 1]


def library(num_tasks=3, learned=False):
    lib = new_library(observation_dim=4, num_actions=3, feature_dim=2, hidden=(5,), seed=7)
    for k in range(num_tasks):
        lib = spawn_task(lib, TaskSpec(k, [1.0, float(k)]), warm_start=False, learned=learned)
    return lib


def test_xi_eval_shapes(rng):
    net = random_xi_net(rng)
    assert xi_eval(net, rng.normal(size=4)).shape == (3, 2)
    assert xi_eval(net, rng.normal(size=(6, 4))).shape == (6, 3, 2)


def test_q_from_xi_is_linear_in_weights(rng):
    xi = rng.normal(size=(3, 2))
    w1, w2 = rng.normal(size=2), rng.normal(size=2)
    combined = q_from_xi(xi, RewardModel(2.0 * w1 + w2))
    assert np.allclose(combined, 2.0 * q_from_xi(xi, RewardModel(w1)) + q_from_xi(xi, RewardModel(w2)))
    with pytest.raises(ShapeError):
        q_from_xi(xi, RewardModel([1.0, 2.0, 3.0]))


def test_exact_xi_reconstructs_policy_values():
    mdp = ChainMDP.chain()
    xi = successor_features(mdp, RIGHT, GAMMA)
    rng = np.random.default_rng(0)
    for _ in range(10):
        w = rng.normal(size=2)
        q_dp = policy_evaluation(mdp, w, RIGHT, GAMMA)
        for s in range(mdp.num_states):
            assert np.allclose(q_from_xi(xi[s], RewardModel(w)), q_dp[s], atol=1e-8)


def test_linear_xi_net_has_zero_expected_residual():
    mdp = ChainMDP.chain()
    xi = successor_features(mdp, RIGHT, GAMMA)
    net = linear_xi_net(xi)
    for s in range(5):
        assert np.allclose(xi_eval(net, one_hot(s, 5)), xi[s])
        for a in range(2):
            expected = np.zeros(2)
            for s_next in range(5):
                p = mdp.transitions[s, a, s_next]
                if p == 0.0:
                    continue
                t = Transition(one_hot(s, 5), a, 0.0, one_hot(s_next, 5),
                               mdp.features[s, a, s_next], False, 0, b"")
                expected += p * bellman_residual(net, t, RIGHT[s_next], GAMMA).delta
            assert np.allclose(expected, 0.0, atol=1e-10)


def test_spawn_task_warm_start_copies_previous_block():
    lib = new_library(4, 3, 2, hidden=(5,), seed=1)
    lib = spawn_task(lib, TaskSpec(0, [1.0, 0.0]), warm_start=True)
    lib = spawn_task(lib, TaskSpec(1, [0.0, 1.0]), warm_start=True)
    assert lib.active_count == 2
    assert lib.xi_nets[1].params is lib.xi_nets[0].params
    assert np.array_equal(lib.xi_nets[0].params.values, net_init(lib.layout, lib.block_seed(0)).values)


def test_spawn_task_fresh_blocks_differ():
    lib = library()
    assert not np.array_equal(lib.xi_nets[0].params.values, lib.xi_nets[1].params.values)
    assert np.array_equal(lib.reward_models[2].weights, [1.0, 2.0])


def test_spawn_task_errors():
    lib = new_library(4, 3, 2, hidden=(5,))
    with pytest.raises(UsageError):
        spawn_task(lib, TaskSpec(1, [1.0, 0.0]), warm_start=False)
    with pytest.raises(ShapeError):
        spawn_task(lib, TaskSpec(0, [1.0, 0.0, 0.0]), warm_start=False)


def test_reward_model_update():
    provided = RewardModel([1.0, 0.0])
    with pytest.raises(UsageError):
        reward_model_update(provided, [1.0, 0.0], 1.0, 0.1)

    model = library(1, learned=True).reward_models[0]
    assert model.learned
    assert np.all(np.abs(model.weights) <= 0.01)
    phi = np.array([1.0, 0.5])
    before = (2.0 - model.weights @ phi) ** 2
    model = reward_model_update(model, phi, 2.0, 0.1)
    assert (2.0 - model.weights @ phi) ** 2 < before


def test_library_is_immutable_value():
    lib = library()
    lib2 = lib.with_block(1, lib.xi_nets[0])
    assert lib.xi_nets[1] is not lib.xi_nets[0]
    assert lib2.xi_nets[0] is lib.xi_nets[0]
    assert lib2.xi_nets[2] is lib.xi_nets[2]


def test_checkpoint_restores_library_exactly(tmp_path):
    lib = library(learned=True)
    path = tmp_path / "checkpoint.zip"
    save_checkpoint(lib, str(path))
    restored = load_checkpoint(str(path))
    assert restored.active_count == 3
    assert restored.layout == lib.layout
    for a, b in zip(lib.xi_nets, restored.xi_nets):
        assert a.params.values.tobytes() == b.params.values.tobytes()
    for a, b in zip(lib.reward_models, restored.reward_models):
        assert np.array_equal(a.weights, b.weights)
        assert a.learned == b.learned


def test_checkpoint_is_deterministic():
    lib = library()
    assert save_checkpoint(lib).getvalue() == save_checkpoint(lib).getvalue()


def test_checkpoint_qnet():
    qnet = QNet(net_init((4, 6, 3), seed=2), 3)
    restored = load_checkpoint(save_checkpoint(qnet))
    assert isinstance(restored, QNet)
    assert np.array_equal(restored.params.values, qnet.params.values)


def test_checkpoint_digest_mismatch():
    original = save_checkpoint(library())
    tampered = io.BytesIO()
    with zipfile.ZipFile(original) as src, zipfile.ZipFile(tampered, "w") as dst:
        for name in src.namelist():
            data = src.read(name)
            if name == "blocks/001.bin":
                data = data[:-1] + bytes([data[-1] ^ 0xFF])
            dst.writestr(name, data)
    with pytest.raises(InputError):
        load_checkpoint(tampered)


def test_checkpoint_not_a_zip():
    with pytest.raises(InputError):
        load_checkpoint(io.BytesIO(b"not a zip"))
