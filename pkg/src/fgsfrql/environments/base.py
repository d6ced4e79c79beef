"""
Base class shared by the multi-task environments.

All environments have the same episodic interface. Dynamics and features
are shared across tasks; a task only changes the reward weights (and, for
mazes, the goal coordinates shown in the observation).
"""

from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

import numpy as np

from fgsfrql.errors import UsageError
from fgsfrql.models.constants import DEFAULT_HORIZON
from fgsfrql.models.tasks import TaskSpec
from fgsfrql.validators import validate_action, validate_width

StepResult = Tuple[np.ndarray, np.ndarray, bool]


def task_reward(task: TaskSpec, features) -> float:
    """Reward of a task for a feature vector: r = phi . w.

    Raises:
        ShapeError: If the feature width differs from the task's weights
    """
    validate_width("features", features, task.feature_dim)
    return float(np.dot(task.reward_weights, np.asarray(features, dtype=np.float64)))


def action_key(action: int) -> bytes:
    return int(action).to_bytes(2, "little")


class Environment(ABC):
    """Single-owner episodic environment with a fixed task set.

    Subclasses set ``name``, ``num_actions``, ``observation_dim``,
    ``feature_dim`` and ``tasks`` and implement the abstract hooks.
    """

    name = "environment"
    num_actions = 0
    observation_dim = 0
    feature_dim = 0

    def __init__(self, tasks: List[TaskSpec], horizon: int = DEFAULT_HORIZON):
        self.tasks = list(tasks)
        self.horizon = horizon
        self.task_id = 0
        self._done = True

    # ===== TASKS =====

    @property
    def task(self) -> TaskSpec:
        return self.tasks[self.task_id]

    def set_task(self, task_id: int) -> None:
        """Select the active task; dynamics are unaffected."""
        if not 0 <= task_id < len(self.tasks):
            raise UsageError(f"Task {task_id} outside [0, {len(self.tasks)})")
        self.task_id = int(task_id)

    # ===== EPISODES =====

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        """Start a new episode and return the initial observation."""
        self._reset_state(seed)
        self._done = False
        return self.observe()

    def step(self, action: int) -> StepResult:
        """Apply an action; returns (observation, features, terminal).

        Raises:
            InputError: If the action is out of range
            UsageError: If the episode has terminated and was not reset
        """
        validate_action(action, self.num_actions)
        if self._done:
            raise UsageError("Episode has ended; call reset() first")
        s = self.observe()
        self._apply(int(action))
        s_next = self.observe()
        features = self.feature_of(s, int(action), s_next)
        terminal = self._is_terminal()
        self._done = terminal
        return s_next, features, terminal

    # ===== HOOKS =====

    @abstractmethod
    def _reset_state(self, seed: Optional[int]) -> None:
        ...

    @abstractmethod
    def _apply(self, action: int) -> None:
        ...

    @abstractmethod
    def _is_terminal(self) -> bool:
        ...

    @abstractmethod
    def observe(self) -> np.ndarray:
        """Observation of the current state under the active task."""

    @abstractmethod
    def feature_of(self, s: np.ndarray, a: int, s_next: np.ndarray) -> np.ndarray:
        """phi(s, a, s_next)."""

    @abstractmethod
    def pivot_key(self, s: np.ndarray, a: int) -> bytes:
        """Deterministic key of the state-action pair (s, a)."""
