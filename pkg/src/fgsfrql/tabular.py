"""
Exact dynamic-programming oracles on small finite MDPs.

Successor features and Q-values of a deterministic policy pi solve linear
systems over state-action pairs:

    xi = E[phi | s, a] + gamma * M xi,   Q = r + gamma * M Q

where M[(s, a), (s', a')] = P(s' | s, a) * 1(a' = pi(s')). Both are solved
exactly with numpy.linalg.solve.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from fgsfrql.environments.chain import chain_features, chain_transitions
from fgsfrql.errors import ShapeError
from fgsfrql.validators import validate_probability, validate_width


@dataclass(frozen=True)
class ChainMDP:
    """Finite MDP with features.

    Attributes:
        transitions (np.ndarray): P[s, a, s']
        features (np.ndarray): Phi[s, a, s', :]
    """

    transitions: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        S, A, S2 = self.transitions.shape
        if S != S2 or self.features.shape[:3] != (S, A, S):
            raise ShapeError(f"Inconsistent shapes {self.transitions.shape} and {self.features.shape}")
        if not np.allclose(self.transitions.sum(axis=2), 1.0):
            raise ShapeError("Transition rows must sum to 1")

    @classmethod
    def chain(cls) -> "ChainMDP":
        """The five-state chain of the chain_test environment."""
        return cls(chain_transitions(), chain_features())

    @property
    def num_states(self) -> int:
        return self.transitions.shape[0]

    @property
    def num_actions(self) -> int:
        return self.transitions.shape[1]

    @property
    def feature_dim(self) -> int:
        return self.features.shape[3]

    def expected_features(self) -> np.ndarray:
        """E[phi | s, a] as [S, A, d]."""
        return np.einsum("ijk,ijkl->ijl", self.transitions, self.features)

    def policy_operator(self, policy: Sequence[int]) -> np.ndarray:
        """M of shape [S*A, S*A] for a deterministic policy."""
        S, A = self.num_states, self.num_actions
        selector = np.zeros((S, S * A))
        selector[np.arange(S), np.arange(S) * A + np.asarray(policy)] = 1.0
        return self.transitions.reshape(S * A, S) @ selector


def _solve(mdp: ChainMDP, policy, gamma, rhs):
    validate_probability("gamma", gamma)
    S, A = mdp.num_states, mdp.num_actions
    system = np.eye(S * A) - gamma * mdp.policy_operator(policy)
    return np.linalg.solve(system, rhs.reshape(S * A, -1))


def successor_features(mdp: ChainMDP, policy: Sequence[int], gamma: float) -> np.ndarray:
    """Exact successor features xi[s, a, :] of a deterministic policy."""
    xi = _solve(mdp, policy, gamma, mdp.expected_features())
    return xi.reshape(mdp.num_states, mdp.num_actions, mdp.feature_dim)


def policy_evaluation(mdp: ChainMDP, w, policy: Sequence[int], gamma: float) -> np.ndarray:
    """Exact Q[s, a] of a deterministic policy for rewards r = phi . w."""
    validate_width("w", w, mdp.feature_dim)
    rewards = mdp.expected_features() @ np.asarray(w, dtype=np.float64)
    return _solve(mdp, policy, gamma, rewards).reshape(mdp.num_states, mdp.num_actions)


def gpi_policy(xis: Sequence[np.ndarray], w) -> np.ndarray:
    """Deterministic GPI policy from exact successor features.

    Per state, the argmax over (policy, action) of xi_k[s, a] . w, ties to the
    lowest policy then the lowest action.
    """
    values = np.stack([xi @ np.asarray(w, dtype=np.float64) for xi in xis])  # [k, S, A]
    k, S, A = values.shape
    flat = np.argmax(values.transpose(1, 0, 2).reshape(S, k * A), axis=1)
    return flat % A


def state_values(q: np.ndarray, policy: Sequence[int]) -> np.ndarray:
    """V[s] = Q[s, pi(s)]."""
    return q[np.arange(q.shape[0]), np.asarray(policy)]
