"""
Run records and their file formats.

A run produces:
- a CSV step log, one StepRow per environment step (STEP_COLUMNS)
- summary.json: config echo, seed, per-task evaluation, run statistics
- a checkpoint (see fgsfrql.successor.save_checkpoint)

Floats in the CSV are written with 17 significant digits so a log read back
compares equal to the rows that produced it.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from fgsfrql.errors import InputError
from fgsfrql.models.config import TrainConfig
from fgsfrql.utils import format_float

STEP_COLUMNS = (
    "step",
    "task_id",
    "reward",
    "cumulative_task_reward",
    "residual_norm",
    "batch_msbe",
    "chosen_policy",
    "wall_clock_ns",
)
_INT_COLUMNS = ("step", "task_id", "chosen_policy", "wall_clock_ns")

STEPS_FILE = "steps.csv"
SUMMARY_FILE = "summary.json"
CHECKPOINT_FILE = "checkpoint.zip"


@dataclass(frozen=True)
class StepRow:
    """One logged environment step.

    chosen_policy is -1 when no update happened on this step.
    """

    step: int
    task_id: int
    reward: float
    cumulative_task_reward: float
    residual_norm: float
    batch_msbe: float
    chosen_policy: int
    wall_clock_ns: int = 0

    def csv_values(self):
        return [str(getattr(self, name)) if name in _INT_COLUMNS else format_float(getattr(self, name))
                for name in STEP_COLUMNS]


@dataclass(frozen=True)
class TaskEvaluation:
    """Greedy evaluation of one task: undiscounted episode returns."""

    task_id: int
    mean: float
    std: float
    returns: Tuple[float, ...] = ()

    def json_dict(self):
        return {
            "task_id": self.task_id,
            "mean": self.mean,
            "std": self.std,
            "returns": list(self.returns),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["task_id"]), float(data["mean"]), float(data["std"]),
                   tuple(float(r) for r in data.get("returns", ())))


@dataclass
class RunRecord:
    """Everything a seeded run produces.

    Attributes:
        config (TrainConfig): Configuration echo
        rows (list): Per-step StepRows
        evaluations (list): Per-task TaskEvaluations after training
        stats (dict): Run statistics (skip rate, GPI transfer rates, episodes)
        model: Trained PolicyLibrary or QNet; not serialized
    """

    config: TrainConfig
    rows: List[StepRow] = field(default_factory=list)
    evaluations: List[TaskEvaluation] = field(default_factory=list)
    stats: Dict[str, Any] = field(default_factory=dict)
    model: Optional[Any] = field(default=None, repr=False, compare=False)

    @property
    def seed(self) -> int:
        return self.config.seed

    def final_cumulative_rewards(self) -> Dict[int, float]:
        """Last logged cumulative_task_reward per task id."""
        final = {}
        for row in self.rows:
            final[row.task_id] = row.cumulative_task_reward
        return dict(sorted(final.items()))

    def json_dict(self):
        """Dictionary written to summary.json."""
        return {
            "algorithm": self.config.algorithm,
            "env": self.config.env,
            "seed": self.seed,
            "config": self.config.json_dict(),
            "evaluation": [e.json_dict() for e in self.evaluations],
            "final_cumulative_reward": {str(k): v for k, v in self.final_cumulative_rewards().items()},
            "stats": self.stats,
        }


def record_handler(obj):
    """JSON default hook: objects serialize through their json_dict()."""
    if hasattr(obj, "json_dict"):
        return obj.json_dict()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def write_step_log(rows, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STEP_COLUMNS)
        for row in rows:
            writer.writerow(row.csv_values())
    return path


def read_step_log(path) -> List[StepRow]:
    """Read a CSV step log.

    Raises:
        InputError: If the header or a value does not match the schema
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"Step log not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != STEP_COLUMNS:
            raise InputError(f"{path} does not have the step log columns {list(STEP_COLUMNS)}")
        rows = []
        for line_no, values in enumerate(reader, start=2):
            if len(values) != len(STEP_COLUMNS):
                raise InputError(f"{path}:{line_no} has {len(values)} fields, expected {len(STEP_COLUMNS)}")
            try:
                parsed = {name: int(v) if name in _INT_COLUMNS else float(v)
                          for name, v in zip(STEP_COLUMNS, values)}
            except ValueError as exc:
                raise InputError(f"{path}:{line_no}: {exc}")
            rows.append(StepRow(**parsed))
    return rows


def write_summary(record: RunRecord, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(record, default=record_handler, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return path


def read_summary(path) -> dict:
    """Read summary.json.

    Raises:
        InputError: If the file is missing or not a run summary
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"Summary not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}")
    for key in ("algorithm", "env", "seed", "config", "evaluation"):
        if key not in data:
            raise InputError(f"{path} is missing '{key}'")
    return data


@dataclass(frozen=True)
class LoadedRun:
    """A run read back from its output directory."""

    directory: Path
    summary: dict
    rows: List[StepRow]

    @property
    def algorithm(self) -> str:
        return self.summary["algorithm"]

    @property
    def config(self) -> TrainConfig:
        return TrainConfig.from_dict(self.summary["config"])

    @property
    def evaluations(self) -> List[TaskEvaluation]:
        return [TaskEvaluation.from_dict(e) for e in self.summary["evaluation"]]


def load_run(directory) -> LoadedRun:
    """Read steps.csv and summary.json from a run directory."""
    directory = Path(directory)
    return LoadedRun(directory, read_summary(directory / SUMMARY_FILE), read_step_log(directory / STEPS_FILE))
