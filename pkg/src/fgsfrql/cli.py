"""
Command-line interface: ``fg-sfrql <command> [options]``.

Commands:
    train      one seeded run -> steps.csv, summary.json, checkpoint.zip
    suite      runs x seeds from a suite file, plus its charts
    eval       greedy evaluation of a checkpoint
    gradcheck  finite-difference check of every gradient rule
    overhead   per-step update cost of each algorithm
    plot       SVG chart over run directories
    compare    comparison table over run directories

Exit status is 0 on success, 2 for usage and configuration errors and 1
for runtime failures.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from fgsfrql import __version__
from fgsfrql.client import ExperimentClient, write_run
from fgsfrql.environments import make_env
from fgsfrql.errors import ConfigurationError, FgSfrqlError, NumericError
from fgsfrql.evaluation import evaluate
from fgsfrql.gradcheck import run_gradcheck
from fgsfrql.metrics import compare_summary
from fgsfrql.models.constants import (
    DEFAULT_EVAL_EPISODES,
    DEFAULT_EVAL_STEP_CAP,
    OVERHEAD_STUB,
    Algorithm,
    EnvName,
    LrSchedule,
    PlotKind,
)
from fgsfrql.models.config import TrainConfig
from fgsfrql.models.records import record_handler
from fgsfrql.models.suite import ExperimentSuite
from fgsfrql.plotting import emit_plots
from fgsfrql.successor import PolicyLibrary, load_checkpoint
from fgsfrql.trainer import measure_overhead, train

logger = logging.getLogger(__name__)

# flag dest -> TrainConfig field
_TRAIN_FLAGS = {
    "env": "env",
    "algo": "algorithm",
    "seed": "seed",
    "steps_per_task": "steps_per_task",
    "num_tasks": "num_tasks",
    "alpha": "alpha",
    "gamma": "gamma",
    "epsilon": "epsilon",
    "averaging_n": "averaging_n",
    "lr_schedule": "lr_schedule",
    "learn_rewards": "learn_rewards",
    "minibatch": "minibatch",
}


def load_config_file(path) -> dict:
    """Parse a YAML or JSON mapping.

    Raises:
        ConfigurationError: If the file is missing, unparsable or not a mapping
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigurationError(f"Malformed config file {path}: {exc}")
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must hold a mapping")
    # file keys may use the flag spelling
    data = {key.replace("-", "_"): value for key, value in data.items()}
    if "algo" in data:
        data["algorithm"] = data.pop("algo")
    return data


def config_from_args(args) -> TrainConfig:
    """File values, then flags on top."""
    values = load_config_file(args.config) if args.config else {}
    values.pop("out", None)
    for flag, name in _TRAIN_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            values[name] = value
    return TrainConfig.from_dict(values)


def _add_train_flags(parser) -> None:
    parser.add_argument("--config", help="YAML or JSON file with TrainConfig keys")
    parser.add_argument("--env", choices=EnvName.ALL)
    parser.add_argument("--algo", choices=Algorithm.ALL)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--steps-per-task", type=int)
    parser.add_argument("--num-tasks", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--averaging-n", type=int)
    parser.add_argument("--lr-schedule", choices=LrSchedule.ALL)
    parser.add_argument("--learn-rewards", action="store_true", default=None,
                        help="learn reward weights online instead of using the task's")
    parser.add_argument("--minibatch", action="store_true", default=None,
                        help="replay minibatch updates for sequential successor feature runs")


def _print_evaluations(evaluations) -> None:
    for e in evaluations:
        print(f"task {e.task_id}: mean {e.mean:.4f} std {e.std:.4f}")


# ===== COMMANDS =====

def cmd_train(args) -> int:
    config = config_from_args(args)
    out = Path(args.out) if args.out else ExperimentClient().run_directory(config)
    record = train(config)
    write_run(record, out)
    _print_evaluations(record.evaluations)
    print(f"wrote {out}")
    return 0


def cmd_suite(args) -> int:
    path = Path(args.suite_file)
    suite = ExperimentSuite.from_dict(load_config_file(path), base_dir=path.parent)
    if args.out:
        suite.output_dir = Path(args.out)
    directories = ExperimentClient(suite.output_dir).run_suite(suite, args.workers)
    print(f"wrote {len(directories)} runs and {len(suite.plots)} charts to {suite.output_dir}")
    return 0


def cmd_eval(args) -> int:
    model = load_checkpoint(args.checkpoint)
    env = make_env(args.env, args.layout_seed)
    tasks = env.tasks
    if isinstance(model, PolicyLibrary):
        tasks = tasks[:model.active_count]
    evaluations = evaluate(model, env, tasks, args.episodes, args.step_cap, np.random.default_rng(args.seed))
    _print_evaluations(evaluations)
    if args.out:
        Path(args.out).write_text(json.dumps(evaluations, default=record_handler, indent=2) + "\n",
                                  encoding="utf-8")
    return 0


def cmd_gradcheck(args) -> int:
    report = run_gradcheck(trials=args.trials, seed=args.seed, eps=args.eps, tolerance=args.tolerance)
    print(report.text())
    if args.out:
        Path(args.out).write_text(json.dumps(report.json_dict(), indent=2) + "\n", encoding="utf-8")
    return 0 if report.passed else 1


def cmd_overhead(args) -> int:
    config = config_from_args(args)
    results = measure_overhead(config, args.n_steps, args.algorithms)
    print(f"{'algorithm':<16} {'mean ms':>10} {'variance':>12} {'skipped':>8}")
    for stats in results.values():
        print(f"{stats.algorithm:<16} {stats.mean_ms:>10.4f} {stats.variance_ms:>12.4g} {stats.skipped:>8d}")
    if args.out:
        Path(args.out).write_text(json.dumps(list(results.values()), default=record_handler, indent=2) + "\n",
                                  encoding="utf-8")
    return 0


def cmd_plot(args) -> int:
    colors = {}
    if args.config:
        colors = load_config_file(args.config).get("colors") or {}
    emit_plots(args.runs, args.kind, args.out, colors)
    print(f"wrote {args.out}")
    return 0


def cmd_compare(args) -> int:
    table = compare_summary(args.runs)
    print(table.text())
    if args.out:
        table.write_csv(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fg-sfrql", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="one seeded training run")
    _add_train_flags(p)
    p.add_argument("--out", help="run directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("suite", help="runs x seeds from a suite file")
    p.add_argument("suite_file")
    p.add_argument("--out", help="override the suite's output_dir")
    p.add_argument("--workers", type=int, help="worker processes (default: FG_SFRQL_THREADS or 1)")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("eval", help="greedy evaluation of a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("--env", choices=EnvName.ALL, default=EnvName.FOUR_ROOMS)
    p.add_argument("--layout-seed", type=int, default=0)
    p.add_argument("--episodes", type=int, default=DEFAULT_EVAL_EPISODES)
    p.add_argument("--step-cap", type=int, default=DEFAULT_EVAL_STEP_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the evaluation as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference gradient check")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--out", help="write the report as JSON")
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("overhead", help="per-step update cost")
    _add_train_flags(p)
    p.add_argument("--n-steps", type=int, default=1000)
    p.add_argument("--algorithms", nargs="+", choices=Algorithm.ALL + (OVERHEAD_STUB,))
    p.add_argument("--out", help="write the table as JSON")
    p.set_defaults(func=cmd_overhead)

    p = sub.add_parser("plot", help="SVG chart over run directories")
    p.add_argument("runs", nargs="*")
    p.add_argument("--kind", choices=PlotKind.ALL, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="suite or config file with a colors mapping")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("compare", help="comparison table over run directories")
    p.add_argument("runs", nargs="+")
    p.add_argument("--out", help="write the table as CSV")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except (NumericError, OSError) as exc:
        print(f"fg-sfrql {args.command}: {exc}", file=sys.stderr)
        return 1
    except FgSfrqlError as exc:
        print(f"fg-sfrql {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
