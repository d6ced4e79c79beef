"""
Static SVG charts over run outputs.

Three kinds, all drawn from steps.csv and summary.json only:

- cumulative: cumulative training reward per label, mean and std band over
  seeds. Sequential runs plot the per-task running sum, so task boundaries
  show as resets to zero; randomized runs plot the total running sum.
- ablation: total cumulative reward per label, one curve per averaging N.
- final_eval: grouped bars of per-task evaluation means with error bars.

Output is byte-identical for identical inputs: figures are built on a bare
matplotlib Figure with a fixed SVG hash salt and no date metadata.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from fgsfrql.errors import InputError
from fgsfrql.metrics import group_runs
from fgsfrql.models.constants import ALGORITHM_COLORS, Algorithm, PlotKind
from fgsfrql.models.records import LoadedRun, load_run
from fgsfrql.utils import hex_to_rgb
from fgsfrql.validators import validate_choice

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "fg-sfrql"
FIGURE_SIZE = (8.0, 4.5)
_RC = {"svg.hashsalt": SVG_HASH_SALT, "svg.fonttype": "path"}


def training_curve(run: LoadedRun, total: bool = False) -> np.ndarray:
    """Cumulative reward per step.

    Sequential and baseline runs use the logged per-task running sum unless
    ``total`` is set; randomized runs always use the running sum of all
    rewards.
    """
    sequential = run.algorithm in Algorithm.SEQUENTIAL or run.algorithm in Algorithm.BASELINES
    if sequential and not total:
        return np.array([row.cumulative_task_reward for row in run.rows])
    return np.cumsum([row.reward for row in run.rows])


def _stack(label: str, curves: List[np.ndarray]) -> np.ndarray:
    lengths = {len(c) for c in curves}
    if len(lengths) != 1:
        raise InputError(f"Runs of {label} logged different numbers of steps: {sorted(lengths)}")
    return np.stack(curves)


def _shade(rgb, index: int, count: int):
    """Blend toward white so variants of one algorithm stay distinguishable."""
    if count <= 1:
        return rgb
    t = 0.6 * index / (count - 1)
    return tuple(c + (1.0 - c) * t for c in rgb)


def _colors(groups: Dict[str, List[LoadedRun]], colors: Dict[str, str]):
    by_algorithm = {}
    for label, runs in groups.items():
        by_algorithm.setdefault(runs[0].algorithm, []).append(label)
    result = {}
    for algorithm, labels in by_algorithm.items():
        rgb = hex_to_rgb(colors.get(algorithm, ALGORITHM_COLORS.get(algorithm, "#000000")))
        for index, label in enumerate(labels):
            result[label] = _shade(rgb, index, len(labels))
    return result


def _check_schema(runs: List[LoadedRun]) -> None:
    envs = {run.summary["env"] for run in runs}
    if len(envs) != 1:
        raise InputError(f"Runs come from different environments: {sorted(envs)}")


def _draw_curves(ax, groups, palette, total: bool) -> None:
    for label, runs in groups.items():
        curves = _stack(label, [training_curve(run, total) for run in runs])
        mean, std = curves.mean(axis=0), curves.std(axis=0)
        steps = np.arange(1, len(mean) + 1)
        ax.plot(steps, mean, color=palette[label], linewidth=1.2, label=f"{label} (n={len(runs)})")
        ax.fill_between(steps, mean - std, mean + std, color=palette[label], alpha=0.2, linewidth=0)
    ax.set_xlabel("environment step")
    ax.set_ylabel("cumulative reward")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper left", fontsize="small")


def _draw_cumulative(fig, groups, palette) -> None:
    ax = fig.add_subplot(1, 1, 1)
    _draw_curves(ax, groups, palette, total=False)
    ax.set_title("Cumulative training reward")


def _draw_ablation(fig, groups, palette) -> None:
    ax = fig.add_subplot(1, 1, 1)
    _draw_curves(ax, groups, palette, total=True)
    ax.set_title("Averaging ablation")


def _draw_final_eval(fig, groups, palette) -> None:
    task_ids = sorted({int(e["task_id"]) for runs in groups.values()
                       for run in runs for e in run.summary["evaluation"]})
    ax = fig.add_subplot(1, 1, 1)
    width = 0.8 / len(groups)
    x = np.arange(len(task_ids))
    for index, (label, runs) in enumerate(groups.items()):
        means, errors = [], []
        for task_id in task_ids:
            values = []
            for run in runs:
                match = [e for e in run.summary["evaluation"] if int(e["task_id"]) == task_id]
                if not match:
                    raise InputError(f"{run.directory} has no evaluation for task {task_id}")
                values.append(float(match[0]["mean"]))
            means.append(np.mean(values))
            # one seed: show the within-run episode spread instead
            if len(runs) == 1:
                errors.append(float(match[0]["std"]))
            else:
                errors.append(float(np.std(values)))
        ax.bar(x + (index - (len(groups) - 1) / 2) * width, means, width, yerr=errors,
               color=palette[label], edgecolor="black", linewidth=0.5, capsize=2, label=label)
    ax.set_xticks(x)
    ax.set_xticklabels([f"task {t}" for t in task_ids])
    ax.set_ylabel("evaluation return")
    ax.set_title("Final evaluation")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend(fontsize="small")


_DRAW = {
    PlotKind.CUMULATIVE: _draw_cumulative,
    PlotKind.ABLATION: _draw_ablation,
    PlotKind.FINAL_EVAL: _draw_final_eval,
}


def emit_plots(run_dirs, kind: str, out_path, colors: Optional[Dict[str, str]] = None) -> Path:
    """Draw one chart of ``kind`` over the runs in ``run_dirs`` and save it as SVG.

    Args:
        run_dirs (list): Run directories (or LoadedRuns)
        kind (str): One of PlotKind.ALL
        out_path: Destination .svg file
        colors (dict): Algorithm -> hex color overrides

    Raises:
        InputError: If there are no runs or their schemas disagree; no file
            is written in that case
        ConfigurationError: If kind is unknown
    """
    validate_choice("kind", kind, PlotKind.ALL)
    runs = [r if isinstance(r, LoadedRun) else load_run(r) for r in run_dirs]
    if not runs:
        raise InputError("No runs to plot")
    _check_schema(runs)
    groups = group_runs(runs)
    palette = _colors(groups, dict(ALGORITHM_COLORS, **(colors or {})))

    out_path = Path(out_path)
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=FIGURE_SIZE, constrained_layout=True)
        _DRAW[kind](fig, groups, palette)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    logger.info("Wrote %s chart of %d runs to %s", kind, len(runs), out_path)
    return out_path
