"""
Constants and enums for fg-sfrql.

This module contains the constant values used throughout the library for
algorithm names, environment names, step-size schedules and chart kinds,
together with the per-environment hyperparameter defaults and the fixed
algorithm color legend used in charts.
"""


class Algorithm:
    """Training algorithms.

    Semi-gradient and full-gradient successor feature learners plus the two
    scalar Q-network baselines.
    """
    DQN = "dqn"
    FGDQN = "fgdqn"
    SFDQN = "sfdqn"
    FG_SFDQN_ALG1 = "fg_sfdqn_alg1"
    FG_SFDQN_ALG2 = "fg_sfdqn_alg2"
    FG_SFDQN_ALG3 = "fg_sfdqn_alg3"

    ALL = (DQN, FGDQN, SFDQN, FG_SFDQN_ALG1, FG_SFDQN_ALG2, FG_SFDQN_ALG3)
    SEQUENTIAL = (SFDQN, FG_SFDQN_ALG1)
    BASELINES = (DQN, FGDQN)
    SUCCESSOR = (SFDQN, FG_SFDQN_ALG1, FG_SFDQN_ALG2, FG_SFDQN_ALG3)


# Pseudo-algorithm accepted by measure_overhead only: does no work.
OVERHEAD_STUB = "noop"


class EnvName:
    """Environment selectors."""
    FOUR_ROOMS = "four_rooms"
    POINT_MAZE_U = "point_maze_u"
    POINT_MAZE_MEDIUM = "point_maze_medium"
    POINT_MAZE_LARGE = "point_maze_large"
    CHAIN_TEST = "chain_test"

    ALL = (FOUR_ROOMS, POINT_MAZE_U, POINT_MAZE_MEDIUM, POINT_MAZE_LARGE, CHAIN_TEST)
    MAZES = (POINT_MAZE_U, POINT_MAZE_MEDIUM, POINT_MAZE_LARGE)


class LrSchedule:
    """Step-size schedules for the xi-network updates."""
    CONSTANT = "constant"
    ROBBINS_MONRO = "robbins_monro"

    ALL = (CONSTANT, ROBBINS_MONRO)


class PlotKind:
    """Chart kinds produced by the plot command."""
    CUMULATIVE = "cumulative"
    ABLATION = "ablation"
    FINAL_EVAL = "final_eval"

    ALL = (CUMULATIVE, ABLATION, FINAL_EVAL)


# Shared hyperparameters (all environments)
DEFAULT_GAMMA = 0.95
DEFAULT_EPSILON = 0.60
DEFAULT_HORIZON = 200
DEFAULT_ALPHA = 0.001
DEFAULT_ALPHA_R = 0.5
DEFAULT_BUFFER_CAPACITY = 200_000
DEFAULT_EVAL_EPISODES = 10
DEFAULT_EVAL_STEP_CAP = 100

# Per-environment hyperparameters
ENV_DEFAULTS = {
    EnvName.FOUR_ROOMS: {
        "steps_per_task": 10_000,
        "num_tasks": 6,
        "batch_size": 64,
        "hidden": (64, 64),
    },
    EnvName.POINT_MAZE_U: {
        "steps_per_task": 30_000,
        "num_tasks": 8,
        "batch_size": 512,
        "hidden": (128, 128),
    },
    EnvName.POINT_MAZE_MEDIUM: {
        "steps_per_task": 30_000,
        "num_tasks": 8,
        "batch_size": 512,
        "hidden": (128, 128),
    },
    EnvName.POINT_MAZE_LARGE: {
        "steps_per_task": 30_000,
        "num_tasks": 8,
        "batch_size": 512,
        "hidden": (128, 128),
    },
    EnvName.CHAIN_TEST: {
        "steps_per_task": 2_000,
        "num_tasks": 3,
        "batch_size": 32,
        "hidden": (16, 16),
    },
}

# Chart legend: algorithm -> color
ALGORITHM_COLORS = {
    Algorithm.DQN: "#1f77b4",
    Algorithm.SFDQN: "#ff7f0e",
    Algorithm.FG_SFDQN_ALG1: "#2ca02c",
    Algorithm.FG_SFDQN_ALG2: "#d62728",
    Algorithm.FG_SFDQN_ALG3: "#9467bd",
    Algorithm.FGDQN: "#8c564b",
}

ALGORITHM_LABELS = {
    Algorithm.DQN: "DQN",
    Algorithm.FGDQN: "FG-DQN",
    Algorithm.SFDQN: "SFDQN",
    Algorithm.FG_SFDQN_ALG1: "FG-SFDQN",
    Algorithm.FG_SFDQN_ALG2: "FG-SFDQN (alg2)",
    Algorithm.FG_SFDQN_ALG3: "FG-SFDQN (alg3)",
}

# Robbins-Monro decay constant: alpha_k = alpha_0 / (1 + k / RM_DECAY_STEPS)
RM_DECAY_STEPS = 10_000
