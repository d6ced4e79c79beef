"""
Kinematic point-mass maze with dense goal-proximity rewards.

A point moves through a cell maze by a fixed displacement per axis for each
of 9 controls in {-1, 0, 1}^2. Walls stop motion by per-axis clipping. Every
goal cell of the map defines one task whose reward is exp(-||x' - g||);
features list the proximity to all goals so each task's reward is the
one-hot selection of its own entry.

Observation: (x, y) position in world units followed by the active task's
goal coordinates. Cells are one world unit wide; cell (row, col) spans
[col, col+1) x [row, row+1).
"""

from typing import Optional

import numpy as np

from fgsfrql.environments.base import Environment, action_key
from fgsfrql.environments.layouts import GridMap, load_grid
from fgsfrql.errors import ConfigurationError
from fgsfrql.models.constants import DEFAULT_HORIZON, EnvName
from fgsfrql.models.tasks import TaskSpec
from fgsfrql.utils import one_hot

STEP_SIZE = 0.2
PIVOT_LATTICE = 0.05

# action index -> (dx, dy); action 4 is (0, 0)
CONTROLS = tuple((dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1))

MAZE_MAPS = {
    EnvName.POINT_MAZE_U: "umaze",
    EnvName.POINT_MAZE_MEDIUM: "medium",
    EnvName.POINT_MAZE_LARGE: "large",
}


def cell_center(cell):
    row, col = cell
    return np.array([col + 0.5, row + 0.5])


class PointMaze(Environment):
    """Point-mass maze; one task per goal cell, never terminal.

    Args:
        grid (GridMap or str): Map or bundled map name ("umaze", "medium", "large")
        horizon (int): Maximum episode length used by training loops
        name (str): Environment selector reported in logs

    Example:
        >>> env = PointMaze("umaze")
        >>> env.feature_dim
        8
    """

    num_actions = len(CONTROLS)
    observation_dim = 4

    def __init__(self, grid="umaze", horizon: int = DEFAULT_HORIZON, name: str = EnvName.POINT_MAZE_U):
        grid = grid if isinstance(grid, GridMap) else load_grid(grid)
        if not grid.goals:
            raise ConfigurationError("Maze map needs at least one goal digit")
        self.grid = grid
        self.name = name
        self.goals = np.array([cell_center(cell) for cell in grid.goals.values()])
        self.feature_dim = len(self.goals)
        tasks = [
            TaskSpec(j, one_hot(j, self.feature_dim), goal_position=tuple(goal))
            for j, goal in enumerate(self.goals)
        ]
        super().__init__(tasks, horizon)
        self.start = cell_center(grid.start)
        self.position = self.start.copy()

    def _is_free_point(self, x: float, y: float) -> bool:
        if not (0.0 <= x < self.grid.cols and 0.0 <= y < self.grid.rows):
            return False
        return self.grid.is_free(int(np.floor(y)), int(np.floor(x)))

    def _move_axis(self, position, axis: int, control: int):
        if control == 0:
            return position
        target = position.copy()
        target[axis] += control * STEP_SIZE
        if self._is_free_point(*target):
            return target
        # Blocked: stop at the edge of the current cell.
        cell = np.floor(position[axis])
        target[axis] = np.nextafter(cell + 1.0, -np.inf) if control > 0 else cell
        return target

    def _reset_state(self, seed: Optional[int]) -> None:
        self.position = self.start.copy()

    def _apply(self, action: int) -> None:
        dx, dy = CONTROLS[action]
        position = self._move_axis(self.position, 0, dx)
        self.position = self._move_axis(position, 1, dy)

    def _is_terminal(self) -> bool:
        return False

    def observe(self) -> np.ndarray:
        return np.concatenate([self.position, self.goals[self.task_id]])

    def feature_of(self, s: np.ndarray, a: int, s_next: np.ndarray) -> np.ndarray:
        position = np.asarray(s_next[:2], dtype=np.float64)
        return np.exp(-np.linalg.norm(self.goals - position, axis=1))

    def pivot_key(self, s: np.ndarray, a: int) -> bytes:
        lattice = np.round(np.asarray(s, dtype=np.float64) / PIVOT_LATTICE).astype('<i8')
        return lattice.tobytes() + action_key(a)
