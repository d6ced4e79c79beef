import numpy as np
import pytest

from fgsfrql.errors import ConfigurationError, UsageError
from fgsfrql.gpi import (
    epsilon_greedy,
    gpi_next_action,
    gpi_select,
    gpi_select_batch,
    gpi_values,
    greedy_action,
)
from fgsfrql.models.tasks import TaskSpec
from fgsfrql.network import ParamVector, layout_size
from fgsfrql.successor import PolicyLibrary, RewardModel, XiNet, new_library, spawn_task
from fgsfrql.tabular import ChainMDP, gpi_policy, policy_evaluation, state_values, successor_features
from fgsfrql.utils import one_hot
from tests.helpers import linear_xi_net

GAMMA = 0.9
RIGHT = [1] * 5
LEFT = [0] * 5


def random_library(num_tasks=3, seed=3):
    lib = new_library(observation_dim=4, num_actions=3, feature_dim=2, hidden=(6,), seed=seed)
    for k in range(num_tasks):
        lib = spawn_task(lib, TaskSpec(k, [1.0, -1.0]), warm_start=False)
    return lib


def test_ties_go_to_lowest_policy_then_action():
    layout = (4, 6)
    zero = XiNet(ParamVector(np.zeros(layout_size(layout)), layout), 3, 2)
    lib = PolicyLibrary(layout, 3, 2, xi_nets=(zero, zero), reward_models=(RewardModel([1.0, 1.0]),) * 2)
    choice = gpi_select(lib, np.ones(4), RewardModel([1.0, 1.0]))
    assert (choice.policy_index, choice.action, choice.value) == (0, 0, 0.0)


def test_duplicate_block_never_wins(rng):
    lib = random_library(1)
    lib = PolicyLibrary(lib.layout, 3, 2, xi_nets=lib.xi_nets * 2, reward_models=lib.reward_models * 2)
    for _ in range(20):
        assert gpi_select(lib, rng.normal(size=4), RewardModel([0.5, 2.0])).policy_index == 0


def test_gpi_value_is_monotone_in_library_size(rng):
    lib = random_library(4)
    reward = RewardModel([1.0, -0.5])
    for _ in range(20):
        s = rng.normal(size=4)
        values = [gpi_select(lib, s, reward, k).value for k in range(1, 5)]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(gpi_values(lib, s, reward).max())


def test_batch_selection_matches_single(rng):
    lib = random_library(3)
    reward = RewardModel([1.0, 0.3])
    states = rng.normal(size=(8, 4))
    cs, actions = gpi_select_batch(lib, states, reward, 2)
    for row in range(8):
        choice = gpi_select(lib, states[row], reward, 2)
        assert (cs[row], actions[row]) == (choice.policy_index, choice.action)


def test_greedy_action_is_single_policy_gpi(rng):
    lib = random_library(1)
    reward = RewardModel([0.2, 1.0])
    s = rng.normal(size=4)
    assert greedy_action(lib.xi_nets[0], s, reward) == gpi_select(lib, s, reward).action


def test_gpi_errors():
    empty = new_library(4, 3, 2, hidden=(6,))
    with pytest.raises(UsageError):
        gpi_select(empty, np.zeros(4), RewardModel([1.0, 0.0]))
    lib = random_library(2)
    with pytest.raises(UsageError):
        gpi_select(lib, np.zeros(4), RewardModel([1.0, 0.0]), 3)
    with pytest.raises(UsageError):
        gpi_select(lib, np.zeros(4), RewardModel([1.0, 0.0]), 0)


def test_gpi_improves_on_every_constituent_policy():
    mdp = ChainMDP.chain()
    xis = [successor_features(mdp, policy, GAMMA) for policy in (RIGHT, LEFT)]
    rng = np.random.default_rng(7)
    for _ in range(10):
        w = rng.normal(size=2)
        improved = gpi_policy(xis, w)
        v_gpi = state_values(policy_evaluation(mdp, w, improved, GAMMA), improved)
        for policy in (RIGHT, LEFT):
            v = state_values(policy_evaluation(mdp, w, policy, GAMMA), policy)
            assert np.all(v_gpi >= v - 1e-8)


def test_library_gpi_agrees_with_tabular_gpi():
    mdp = ChainMDP.chain()
    xis = [successor_features(mdp, policy, GAMMA) for policy in (RIGHT, LEFT)]
    nets = tuple(linear_xi_net(xi) for xi in xis)
    w = np.array([1.0, 0.4])
    lib = PolicyLibrary((5, 4), 2, 2, xi_nets=nets, reward_models=(RewardModel(w),) * 2)
    expected = gpi_policy(xis, w)
    for s in range(5):
        assert gpi_select(lib, one_hot(s, 5), RewardModel(w)).action == expected[s]


def test_epsilon_greedy():
    rng = np.random.default_rng(0)
    assert all(epsilon_greedy(2, 0.0, 4, rng) == 2 for _ in range(50))
    draws = {epsilon_greedy(2, 1.0, 4, rng) for _ in range(200)}
    assert draws == {0, 1, 2, 3}
    with pytest.raises(ConfigurationError):
        epsilon_greedy(0, 1.5, 4, rng)


def test_gpi_next_action_matches_selection(rng):
    lib = new_library(4, 3, 2, hidden=(5,), seed=3)
    for k in range(3):
        lib = spawn_task(lib, TaskSpec(k, rng.normal(size=2)), warm_start=False)
    for _ in range(10):
        s = rng.normal(size=4)
        reward = lib.reward_models[1]
        assert gpi_next_action(lib, s, reward) == gpi_select(lib, s, reward).action
        assert gpi_next_action(lib, s, reward, 1) == greedy_action(lib.xi_nets[0], s, reward)


def test_epsilon_one_is_uniform():
    rng = np.random.default_rng(11)
    draws, num_actions = 10_000, 4
    counts = np.bincount([epsilon_greedy(2, 1.0, num_actions, rng) for _ in range(draws)], minlength=num_actions)
    p = 1.0 / num_actions
    sigma = np.sqrt(draws * p * (1.0 - p))
    assert np.all(np.abs(counts - draws * p) <= 3.0 * sigma)


@pytest.mark.parametrize("scale", [0.01, 0.5, 3.0, 250.0])
def test_gpi_choice_is_invariant_to_reward_scale(rng, scale):
    lib = random_library(4)
    for _ in range(20):
        s = rng.normal(size=4)
        w = rng.normal(size=2)
        base = gpi_select(lib, s, RewardModel(w))
        scaled = gpi_select(lib, s, RewardModel(scale * w))
        assert (scaled.policy_index, scaled.action) == (base.policy_index, base.action)
        assert scaled.value == pytest.approx(scale * base.value)


def test_tie_break_ignores_evaluation_order(rng):
    a, b = random_library(2).xi_nets
    lib = PolicyLibrary(a.params.layout, 3, 2, xi_nets=(b, a, a, b),
                        reward_models=(RewardModel([1.0, 0.0]),) * 4)
    for _ in range(10):
        s = rng.normal(size=4)
        reward = RewardModel(rng.normal(size=2))
        choice = gpi_select(lib, s, reward)
        assert choice.policy_index in (0, 1)
        values = gpi_values(lib, s, reward)
        pairs = [(k, act) for k in range(values.shape[0]) for act in range(values.shape[1])]
        for _ in range(5):
            order = [pairs[j] for j in rng.permutation(len(pairs))]
            best = min(order, key=lambda p: (-values[p], p))
            assert best == (choice.policy_index, choice.action)
        assert gpi_select(lib, s, reward) == choice
