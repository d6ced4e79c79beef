"""
Generalized policy improvement over a policy library.

Selection maximizes Q_k(s, a) = xi_k(s, a, .) . w over policy indices k
and actions a. Ties resolve to the lowest policy index, then the lowest
action: the value table is scanned in row-major (k, a) order and the first
maximum wins.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from fgsfrql.errors import UsageError
from fgsfrql.successor import PolicyLibrary, RewardModel, XiNet, q_from_xi, xi_eval
from fgsfrql.validators import validate_probability


@dataclass(frozen=True)
class GpiChoice:
    """Result of a GPI search.

    Attributes:
        policy_index (int): Index c of the maximizing policy
        action (int): Maximizing action
        value (float): Q_c(s, action) under the searched reward
    """

    policy_index: int
    action: int
    value: float


def gpi_values(lib: PolicyLibrary, s, reward: RewardModel, search_upto: Optional[int] = None) -> np.ndarray:
    """Q-value table [search_upto, |A|] of the first ``search_upto`` policies at s.

    Raises:
        UsageError: If the library is empty or search_upto is out of range
    """
    if lib.active_count == 0:
        raise UsageError("GPI over an empty policy library")
    if search_upto is None:
        search_upto = lib.active_count
    if not 1 <= search_upto <= lib.active_count:
        raise UsageError(f"search_upto must be in [1, {lib.active_count}], got {search_upto}")
    return np.stack([q_from_xi(xi_eval(lib.xi_nets[k], s), reward) for k in range(search_upto)])


def gpi_select(lib: PolicyLibrary, s, reward: RewardModel, search_upto: Optional[int] = None) -> GpiChoice:
    """Argmax over (policy, action) of the reconstructed Q-values at s."""
    values = gpi_values(lib, s, reward, search_upto)
    flat = int(np.argmax(values))
    c, a = divmod(flat, lib.num_actions)
    return GpiChoice(policy_index=c, action=a, value=float(values[c, a]))


def gpi_next_action(lib: PolicyLibrary, s_next, reward: RewardModel, search_upto: Optional[int] = None) -> int:
    """Action component of gpi_select at s_next."""
    return gpi_select(lib, s_next, reward, search_upto).action


def gpi_select_batch(lib: PolicyLibrary, states, reward: RewardModel, search_upto: Optional[int] = None):
    """Row-wise gpi_select over a batch of observations.

    Returns:
        tuple: (policy indices, actions), integer arrays of length batch
    """
    values = gpi_values(lib, np.atleast_2d(states), reward, search_upto)  # [k, batch, |A|]
    flat = np.argmax(values.transpose(1, 0, 2).reshape(values.shape[1], -1), axis=1)
    return np.divmod(flat, lib.num_actions)


def greedy_action(net: XiNet, s, reward: RewardModel) -> int:
    """Greedy action of a single policy under a reward model (lowest index on ties)."""
    return int(np.argmax(q_from_xi(xi_eval(net, s), reward)))


def greedy_actions(net: XiNet, states, reward: RewardModel) -> np.ndarray:
    return np.argmax(q_from_xi(xi_eval(net, np.atleast_2d(states)), reward), axis=1)


def epsilon_greedy(choice_action: int, epsilon: float, num_actions: int, rng) -> int:
    """Uniform random action with probability epsilon, else choice_action.

    One uniform draw decides exploration; a second draw picks the random
    action only when exploring.

    Raises:
        ConfigurationError: If epsilon is outside [0, 1]
    """
    validate_probability("epsilon", epsilon)
    if rng.random() < epsilon:
        return int(rng.integers(num_actions))
    return int(choice_action)
