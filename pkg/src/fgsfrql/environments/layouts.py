"""
Plain-text grid maps.

Map files use one character per cell:
- '#' wall
- '.' free cell
- 'S' start cell (exactly one)
- '0'-'9' free cell carrying the goal with that index

Bundled maps live in the ``maps`` directory next to this module and can be
referenced by bare name (``"four_rooms"``); any other argument is treated as
a filesystem path.
"""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from fgsfrql.errors import ConfigurationError

WALL = "#"
FREE = "."
START = "S"

Cell = Tuple[int, int]


@dataclass(frozen=True)
class GridMap:
    """Parsed grid map.

    Attributes:
        walls (np.ndarray): Boolean array [rows, cols], True where a wall is
        start (tuple): (row, col) of the start cell
        goals (dict): Goal index -> (row, col)
    """

    walls: np.ndarray
    start: Cell
    goals: Dict[int, Cell]

    @property
    def rows(self) -> int:
        return int(self.walls.shape[0])

    @property
    def cols(self) -> int:
        return int(self.walls.shape[1])

    def is_free(self, row: int, col: int) -> bool:
        """True if (row, col) is inside the map and not a wall."""
        return 0 <= row < self.rows and 0 <= col < self.cols and not self.walls[row, col]

    def free_cells(self):
        """All free cells in row-major order."""
        return [(r, c) for r in range(self.rows) for c in range(self.cols) if not self.walls[r, c]]


def parse_grid(text: str) -> GridMap:
    """Parse map text into a GridMap.

    Raises:
        ConfigurationError: On ragged rows, unknown characters, a missing or
            repeated start cell, or a repeated goal index
    """
    lines = [line.rstrip("\r\n") for line in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ConfigurationError("Grid map is empty")

    width = len(lines[0])
    walls = np.zeros((len(lines), width), dtype=bool)
    start = None
    goals = {}
    for row, line in enumerate(lines):
        if len(line) != width:
            raise ConfigurationError(f"Grid row {row} has width {len(line)}, expected {width}")
        for col, char in enumerate(line):
            if char == WALL:
                walls[row, col] = True
            elif char == START:
                if start is not None:
                    raise ConfigurationError(f"Grid has more than one start cell: {start} and {(row, col)}")
                start = (row, col)
            elif char.isdigit():
                index = int(char)
                if index in goals:
                    raise ConfigurationError(f"Goal {index} appears twice in grid")
                goals[index] = (row, col)
            elif char != FREE:
                raise ConfigurationError(f"Unknown grid character {char!r} at row {row}, col {col}")

    if start is None:
        raise ConfigurationError("Grid has no start cell 'S'")
    walls.flags.writeable = False
    return GridMap(walls=walls, start=start, goals=dict(sorted(goals.items())))


def load_grid(name_or_path) -> GridMap:
    """Load a bundled map by name or a map file by path.

    Raises:
        ConfigurationError: If the map cannot be found or is malformed
    """
    path = Path(name_or_path)
    if path.suffix == "" and path.parent == Path("."):
        resource = resources.files("fgsfrql.environments").joinpath("maps").joinpath(f"{path.name}.txt")
        if not resource.is_file():
            raise ConfigurationError(f"No bundled grid map named {path.name!r}")
        return parse_grid(resource.read_text(encoding="utf-8"))
    if not path.is_file():
        raise ConfigurationError(f"Grid map file not found: {path}")
    return parse_grid(path.read_text(encoding="utf-8"))
