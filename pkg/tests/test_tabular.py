import numpy as np
import pytest

from fgsfrql.errors import ShapeError
from fgsfrql.tabular import (
    ChainMDP,
    gpi_policy,
    policy_evaluation,
    state_values,
    successor_features,
)

GAMMA = 0.9


def test_chain_mdp_shapes():
    mdp = ChainMDP.chain()
    assert (mdp.num_states, mdp.num_actions, mdp.feature_dim) == (5, 2, 2)
    assert mdp.expected_features().shape == (5, 2, 2)


def test_policy_operator_is_stochastic():
    mdp = ChainMDP.chain()
    M = mdp.policy_operator([0, 1, 0, 1, 0])
    assert M.shape == (10, 10)
    assert np.allclose(M.sum(axis=1), 1.0)


def test_successor_features_satisfy_bellman_fixed_point():
    mdp = ChainMDP.chain()
    policy = np.array([0, 1, 1, 0, 1])
    xi = successor_features(mdp, policy, GAMMA)
    next_xi = xi[np.arange(5), policy]  # [S', d]
    expected = mdp.expected_features() + GAMMA * np.einsum("ijk,kl->ijl", mdp.transitions, next_xi)
    assert np.allclose(xi, expected, atol=1e-12)


def test_successor_features_are_bounded():
    xi = successor_features(ChainMDP.chain(), [1] * 5, GAMMA)
    assert np.all(xi >= -1e-12)
    assert np.all(xi <= 1.0 / (1.0 - GAMMA) + 1e-9)


def test_policy_evaluation_matches_xi_dot_w():
    mdp = ChainMDP.chain()
    policy = [1, 0, 1, 0, 1]
    xi = successor_features(mdp, policy, GAMMA)
    w = np.array([0.3, -1.7])
    assert np.allclose(policy_evaluation(mdp, w, policy, GAMMA), xi @ w, atol=1e-10)


def test_gpi_policy_ties_go_to_first_policy():
    xi = np.zeros((5, 2, 2))
    assert np.array_equal(gpi_policy([xi, xi], [1.0, 0.0]), np.zeros(5))


def test_state_values():
    q = np.arange(10.0).reshape(5, 2)
    assert np.array_equal(state_values(q, [0, 1, 0, 1, 0]), [0, 3, 4, 7, 8])


def test_chain_mdp_validation():
    P = np.full((2, 1, 2), 0.4)
    with pytest.raises(ShapeError):
        ChainMDP(P, np.zeros((2, 1, 2, 1)))
    with pytest.raises(ShapeError):
        ChainMDP(np.full((2, 1, 2), 0.5), np.zeros((2, 1, 3, 1)))
