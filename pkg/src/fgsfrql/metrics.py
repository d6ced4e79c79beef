"""
Cross-run comparison tables.

Runs are grouped by label (the algorithm, plus N for averaged runs). For
every group and task the table reports the final cumulative training
reward and the final evaluation return, each as mean and standard
deviation over seeds, followed by pairwise differences of the means.
Everything is read from run outputs (summary.json); nothing is recomputed
from checkpoints.
"""

import csv
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from fgsfrql.errors import InputError, UsageError
from fgsfrql.models.constants import ALGORITHM_LABELS, Algorithm
from fgsfrql.models.records import LoadedRun, load_run
from fgsfrql.utils import format_float

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "kind", "label", "other", "task_id", "seeds",
    "train_mean", "train_std", "eval_mean", "eval_std",
    "train_diff", "eval_diff",
)


def run_label(summary: dict) -> str:
    """Grouping label of a run summary."""
    algorithm = summary["algorithm"]
    label = ALGORITHM_LABELS.get(algorithm, algorithm)
    if algorithm == Algorithm.FG_SFDQN_ALG3:
        label = f"{label} N={summary['config']['averaging_n']}"
    return label


def label_order(summary: dict):
    algorithm = summary["algorithm"]
    rank = Algorithm.ALL.index(algorithm) if algorithm in Algorithm.ALL else len(Algorithm.ALL)
    return rank, summary["config"].get("averaging_n", 0)


def group_runs(runs: List[LoadedRun]) -> Dict[str, List[LoadedRun]]:
    """Runs grouped by label, groups in algorithm order."""
    ordered = sorted(runs, key=lambda r: (label_order(r.summary), r.summary["seed"]))
    groups = {}
    for run in ordered:
        groups.setdefault(run_label(run.summary), []).append(run)
    return groups


@dataclass(frozen=True)
class TaskStats:
    """Seed statistics of one (label, task) cell."""

    label: str
    task_id: int
    seeds: int
    train_mean: float
    train_std: float
    eval_mean: float
    eval_std: float


@dataclass(frozen=True)
class PairwiseDiff:
    """Difference of means (label minus other) on one task."""

    label: str
    other: str
    task_id: int
    train_diff: float
    eval_diff: float


@dataclass
class ComparisonTable:
    stats: List[TaskStats] = field(default_factory=list)
    diffs: List[PairwiseDiff] = field(default_factory=list)

    def text(self) -> str:
        lines = [f"{'algorithm':<22} {'task':>4} {'seeds':>5} {'final train':>22} {'final eval':>22}"]
        for s in self.stats:
            lines.append(
                f"{s.label:<22} {s.task_id:>4} {s.seeds:>5} "
                f"{s.train_mean:>11.3f} ± {s.train_std:<8.3f} {s.eval_mean:>11.3f} ± {s.eval_std:<8.3f}"
            )
        lines.append("")
        lines.append(f"{'difference':<44} {'task':>4} {'train':>11} {'eval':>11}")
        for d in self.diffs:
            pair = f"{d.label} - {d.other}"
            lines.append(f"{pair:<44} {d.task_id:>4} {d.train_diff:>+11.3f} {d.eval_diff:>+11.3f}")
        return "\n".join(lines)

    def write_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for s in self.stats:
                writer.writerow(["algorithm", s.label, "", s.task_id, s.seeds,
                                 format_float(s.train_mean), format_float(s.train_std),
                                 format_float(s.eval_mean), format_float(s.eval_std), "", ""])
            for d in self.diffs:
                writer.writerow(["pairwise", d.label, d.other, d.task_id, "", "", "", "", "",
                                 format_float(d.train_diff), format_float(d.eval_diff)])
        return path


def _cell(label: str, runs: List[LoadedRun], task_id: int) -> TaskStats:
    train, evals = [], []
    for run in runs:
        final = run.summary.get("final_cumulative_reward", {})
        if str(task_id) not in final:
            raise InputError(f"{run.directory} has no training rows for task {task_id}")
        train.append(float(final[str(task_id)]))
        matches = [e for e in run.summary["evaluation"] if int(e["task_id"]) == task_id]
        if not matches:
            raise InputError(f"{run.directory} has no evaluation for task {task_id}")
        evals.append(float(matches[0]["mean"]))
    return TaskStats(label, task_id, len(runs), float(np.mean(train)), float(np.std(train)),
                     float(np.mean(evals)), float(np.std(evals)))


def compare_summary(runs) -> ComparisonTable:
    """Per-label, per-task statistics and pairwise differences.

    Args:
        runs (list): LoadedRuns or run directories

    Raises:
        UsageError: If fewer than two labels are present
        InputError: If runs disagree on environment or task set
    """
    runs = [r if isinstance(r, LoadedRun) else load_run(r) for r in runs]
    groups = group_runs(runs)
    if len(groups) < 2:
        raise UsageError(f"Comparison needs at least two algorithms, got {list(groups)}")

    envs = {r.summary["env"] for r in runs}
    if len(envs) != 1:
        raise InputError(f"Runs come from different environments: {sorted(envs)}")
    task_sets = {tuple(sorted(int(e["task_id"]) for e in r.summary["evaluation"])) for r in runs}
    if len(task_sets) != 1:
        raise InputError("Runs were evaluated on different task sets")
    task_ids = task_sets.pop()

    table = ComparisonTable()
    cells: Dict[Tuple[str, int], TaskStats] = {}
    for label, members in groups.items():
        for task_id in task_ids:
            cell = _cell(label, members, task_id)
            cells[(label, task_id)] = cell
            table.stats.append(cell)

    for label, other in itertools.combinations(groups, 2):
        for task_id in task_ids:
            a, b = cells[(label, task_id)], cells[(other, task_id)]
            table.diffs.append(PairwiseDiff(label, other, task_id,
                                            a.train_mean - b.train_mean, a.eval_mean - b.eval_mean))
    logger.info("Compared %d runs in %d groups over %d tasks", len(runs), len(groups), len(task_ids))
    return table
