"""
Four-rooms object collection gridworld.

The agent walks between four rooms joined by one-cell doorways, collecting
objects of k types on its way to a goal in the far corner. Each object pays
out only on its first collection; reaching the goal ends the episode.

Observation: one-hot column (x) + one-hot row (y) + one bit per object
instance (inventory). Features: one bit per object type collected on this
step plus a goal bit, so phi lies in {0, 1}^(k+1).
"""

from typing import Optional

import numpy as np

from fgsfrql.environments.base import Environment, action_key
from fgsfrql.environments.layouts import GridMap, load_grid
from fgsfrql.errors import ConfigurationError
from fgsfrql.models.constants import DEFAULT_HORIZON, EnvName
from fgsfrql.models.tasks import TaskSpec

# up, right, down, left as (d_row, d_col)
MOVES = ((-1, 0), (0, 1), (1, 0), (0, -1))

NUM_OBJECT_TYPES = 3
INSTANCES_PER_TYPE = 4

# Object weights per task; the goal weight is always +1.
TASK_OBJECT_WEIGHTS = (
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (1.0, -1.0, 0.0),
    (0.0, 1.0, -1.0),
    (-1.0, 0.0, 1.0),
)
GOAL_WEIGHT = 1.0


def four_rooms_tasks():
    return [
        TaskSpec(task_id, np.array([*weights, GOAL_WEIGHT]))
        for task_id, weights in enumerate(TASK_OBJECT_WEIGHTS)
    ]


class FourRooms(Environment):
    """Four-rooms gridworld with first-collection object rewards.

    Args:
        grid (GridMap or str): Map or bundled map name; must contain a goal '0'
        layout_seed (int): Seed of the object placement shuffle
        horizon (int): Maximum episode length used by training loops

    Example:
        >>> env = FourRooms()
        >>> obs = env.reset(seed=0)
        >>> obs.shape
        (38,)
    """

    name = EnvName.FOUR_ROOMS
    num_actions = len(MOVES)

    def __init__(self, grid="four_rooms", layout_seed: int = 0, horizon: int = DEFAULT_HORIZON):
        grid = grid if isinstance(grid, GridMap) else load_grid(grid)
        if 0 not in grid.goals:
            raise ConfigurationError("Four-rooms map needs a goal cell '0'")
        super().__init__(four_rooms_tasks(), horizon)
        self.grid = grid
        self.goal = grid.goals[0]

        candidates = [cell for cell in grid.free_cells() if cell not in (grid.start, self.goal)]
        num_objects = NUM_OBJECT_TYPES * INSTANCES_PER_TYPE
        if len(candidates) < num_objects:
            raise ConfigurationError(f"Map has room for {len(candidates)} objects, needs {num_objects}")
        order = np.random.default_rng(layout_seed).permutation(len(candidates))[:num_objects]
        self.objects = [candidates[i] for i in order]
        self.object_types = [i // INSTANCES_PER_TYPE for i in range(num_objects)]
        self._object_at = {cell: index for index, cell in enumerate(self.objects)}

        self.observation_dim = grid.cols + grid.rows + num_objects
        self.feature_dim = NUM_OBJECT_TYPES + 1

        self.position = grid.start
        self.inventory = np.zeros(num_objects)

    def _reset_state(self, seed: Optional[int]) -> None:
        self.position = self.grid.start
        self.inventory = np.zeros(len(self.objects))

    def _apply(self, action: int) -> None:
        d_row, d_col = MOVES[action]
        row, col = self.position[0] + d_row, self.position[1] + d_col
        if not self.grid.is_free(row, col):
            return
        self.position = (row, col)
        index = self._object_at.get(self.position)
        if index is not None:
            self.inventory[index] = 1.0

    def _is_terminal(self) -> bool:
        return self.position == self.goal

    def observe(self) -> np.ndarray:
        obs = np.zeros(self.observation_dim)
        row, col = self.position
        obs[col] = 1.0
        obs[self.grid.cols + row] = 1.0
        obs[self.grid.cols + self.grid.rows:] = self.inventory
        return obs

    def decode(self, obs: np.ndarray):
        """Return ((row, col), inventory) encoded in an observation."""
        cols, rows = self.grid.cols, self.grid.rows
        col = int(np.argmax(obs[:cols]))
        row = int(np.argmax(obs[cols:cols + rows]))
        return (row, col), np.asarray(obs[cols + rows:])

    def feature_of(self, s: np.ndarray, a: int, s_next: np.ndarray) -> np.ndarray:
        _, inventory = self.decode(s)
        position_next, inventory_next = self.decode(s_next)
        features = np.zeros(self.feature_dim)
        for index in np.flatnonzero(inventory_next > inventory):
            features[self.object_types[index]] = 1.0
        if position_next == self.goal:
            features[NUM_OBJECT_TYPES] = 1.0
        return features

    def pivot_key(self, s: np.ndarray, a: int) -> bytes:
        return np.asarray(s, dtype=np.uint8).tobytes() + action_key(a)
