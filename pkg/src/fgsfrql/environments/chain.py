"""
Five-state stochastic chain used by the tabular oracles and smoke runs.

States 0..4 in a row, actions 0 (left) and 1 (right). The intended move
succeeds with probability 0.8; otherwise the agent stays. Features mark
arrival at either end, ``[s' == 4, s' == 0]``. The chain never terminates.
"""

from typing import Optional

import numpy as np

from fgsfrql.environments.base import Environment, action_key
from fgsfrql.models.constants import DEFAULT_HORIZON, EnvName
from fgsfrql.models.tasks import TaskSpec
from fgsfrql.utils import one_hot

NUM_STATES = 5
NUM_ACTIONS = 2
START_STATE = 2
SLIP_FREE = 0.8

TASK_WEIGHTS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


def chain_transitions() -> np.ndarray:
    """Transition tensor P[s, a, s']."""
    P = np.zeros((NUM_STATES, NUM_ACTIONS, NUM_STATES))
    for s in range(NUM_STATES):
        for a, step in enumerate((-1, 1)):
            target = min(max(s + step, 0), NUM_STATES - 1)
            P[s, a, target] += SLIP_FREE
            P[s, a, s] += 1.0 - SLIP_FREE
    return P


def chain_feature(s_next: int) -> np.ndarray:
    return np.array([float(s_next == NUM_STATES - 1), float(s_next == 0)])


def chain_features() -> np.ndarray:
    """Feature tensor Phi[s, a, s', :]; features depend on s' only."""
    per_next = np.stack([chain_feature(s) for s in range(NUM_STATES)])
    return np.broadcast_to(per_next, (NUM_STATES, NUM_ACTIONS, NUM_STATES, 2)).copy()


class ChainEnv(Environment):
    """Sampled version of the tabular chain.

    The environment generator is re-seeded by ``reset(seed)``; without a
    seed the previous stream continues.
    """

    name = EnvName.CHAIN_TEST
    num_actions = NUM_ACTIONS
    observation_dim = NUM_STATES
    feature_dim = 2

    def __init__(self, horizon: int = DEFAULT_HORIZON):
        super().__init__([TaskSpec(j, w) for j, w in enumerate(TASK_WEIGHTS)], horizon)
        self.transitions = chain_transitions()
        self.features = chain_features()
        self.state = START_STATE
        self._rng = np.random.default_rng(0)

    def _reset_state(self, seed: Optional[int]) -> None:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self.state = START_STATE

    def _apply(self, action: int) -> None:
        probabilities = self.transitions[self.state, action]
        self.state = int(self._rng.choice(NUM_STATES, p=probabilities))

    def _is_terminal(self) -> bool:
        return False

    def observe(self) -> np.ndarray:
        return one_hot(self.state, NUM_STATES)

    def feature_of(self, s: np.ndarray, a: int, s_next: np.ndarray) -> np.ndarray:
        return chain_feature(int(np.argmax(s_next)))

    def pivot_key(self, s: np.ndarray, a: int) -> bytes:
        return np.asarray(s, dtype=np.uint8).tobytes() + action_key(a)
