"""
Task and transition records.

This module provides the two records that flow between environments,
replay and the update rules:
- TaskSpec: a task's reward weights (r = phi . w) and optional goal position
- Transition: one environment step, the unit stored in replay and consumed
  by every gradient rule
"""

from dataclasses import dataclass
from typing import Hashable, Optional, Tuple

import numpy as np

from fgsfrql.errors import ConfigurationError


@dataclass(frozen=True)
class TaskSpec:
    """Reward specification of one task.

    Tasks share dynamics and features; they differ only by the weights
    that turn a feature vector into a reward, r = phi . w.

    Attributes:
        task_id (int): Index of the task in [0, m)
        reward_weights (np.ndarray): Weights of width d_phi
        goal_position (tuple): (x, y) of the goal for maze tasks, else None

    Example:
        >>> task = TaskSpec(0, np.array([1.0, 0.0, -1.0, 1.0]))
        >>> task.feature_dim
        4
    """

    task_id: int
    reward_weights: np.ndarray
    goal_position: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if isinstance(self.task_id, bool) or int(self.task_id) != self.task_id or self.task_id < 0:
            raise ConfigurationError(f"task_id must be a non-negative integer, got {self.task_id}")
        weights = np.array(self.reward_weights, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(weights)):
            raise ConfigurationError(f"Task {self.task_id} has non-finite reward weights")
        weights.flags.writeable = False
        object.__setattr__(self, "task_id", int(self.task_id))
        object.__setattr__(self, "reward_weights", weights)
        if self.goal_position is not None:
            object.__setattr__(self, "goal_position",
                               (float(self.goal_position[0]), float(self.goal_position[1])))

    @property
    def feature_dim(self) -> int:
        return int(self.reward_weights.shape[0])

    def json_dict(self):
        """Dictionary representation for summaries and config echoes."""
        d = {
            "task_id": self.task_id,
            "reward_weights": [float(w) for w in self.reward_weights],
        }
        if self.goal_position is not None:
            d["goal_position"] = list(self.goal_position)
        return d


@dataclass(frozen=True)
class Transition:
    """One environment step.

    Attributes:
        s (np.ndarray): Observation before the step
        a (int): Action index
        r (float): Reward of the active task
        s_next (np.ndarray): Observation after the step
        features (np.ndarray): phi(s, a, s_next)
        terminal (bool): Whether s_next is terminal
        task_id (int): Task active when the step was taken
        pivot_key (Hashable): Deterministic key of (s, a) used to group
            same-origin transitions
    """

    s: np.ndarray
    a: int
    r: float
    s_next: np.ndarray
    features: np.ndarray
    terminal: bool
    task_id: int
    pivot_key: Hashable

    def gamma_t(self, gamma: float) -> float:
        """Discount applied to the bootstrap term: 0 at terminal transitions."""
        return 0.0 if self.terminal else gamma
