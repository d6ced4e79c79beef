__version__ = "0.1.0"
__author__ = "fg-sfrql contributors"

# Errors
from fgsfrql.errors import (
    FgSfrqlError,
    ConfigurationError,
    ShapeError,
    InputError,
    UsageError,
    NumericError,
)

# Models
from fgsfrql.models import (
    Algorithm,
    EnvName,
    LrSchedule,
    PlotKind,
    TaskSpec,
    Transition,
    TrainConfig,
    StepRow,
    TaskEvaluation,
    RunRecord,
    LoadedRun,
    load_run,
    ExperimentSuite,
    PlotSpec,
)

# Networks
from fgsfrql.network import (
    ParamVector,
    NetGradient,
    net_init,
    net_forward,
    net_backward,
    finite_diff_grad,
    sgd_step,
)

# Environments
from fgsfrql.environments import (
    Environment,
    make_env,
    env_reset,
    env_step,
    feature_of,
)

# Successor features and GPI
from fgsfrql.successor import (
    XiNet,
    QNet,
    RewardModel,
    PolicyLibrary,
    new_library,
    xi_eval,
    q_from_xi,
    reward_model_update,
    spawn_task,
    save_checkpoint,
    load_checkpoint,
)
from fgsfrql.gpi import (
    GpiChoice,
    gpi_select,
    gpi_next_action,
    epsilon_greedy,
)

# Updates
from fgsfrql.updates import (
    ResidualVec,
    UpdateReport,
    bellman_residual,
    full_gradient,
    semi_gradient,
    averaged_full_gradient,
    dqn_gradient,
    fgdqn_gradient,
    joint_update,
)

# Replay
from fgsfrql.replay import ReplayBuffer

# Training and evaluation
from fgsfrql.trainer import (
    train,
    train_sequential,
    train_randomized,
    train_randomized_averaged,
    train_baseline,
    measure_overhead,
)
from fgsfrql.evaluation import evaluate

# Results
from fgsfrql.metrics import compare_summary
from fgsfrql.plotting import emit_plots
from fgsfrql.gradcheck import run_gradcheck

# Client
from fgsfrql.client import ExperimentClient

__all__ = [
    # Version info
    "__version__",
    "__author__",
    # Errors
    "FgSfrqlError",
    "ConfigurationError",
    "ShapeError",
    "InputError",
    "UsageError",
    "NumericError",
    # Models
    "Algorithm",
    "EnvName",
    "LrSchedule",
    "PlotKind",
    "TaskSpec",
    "Transition",
    "TrainConfig",
    "StepRow",
    "TaskEvaluation",
    "RunRecord",
    "LoadedRun",
    "load_run",
    "ExperimentSuite",
    "PlotSpec",
    # Networks
    "ParamVector",
    "NetGradient",
    "net_init",
    "net_forward",
    "net_backward",
    "finite_diff_grad",
    "sgd_step",
    # Environments
    "Environment",
    "make_env",
    "env_reset",
    "env_step",
    "feature_of",
    # Successor features and GPI
    "XiNet",
    "QNet",
    "RewardModel",
    "PolicyLibrary",
    "new_library",
    "xi_eval",
    "q_from_xi",
    "reward_model_update",
    "spawn_task",
    "save_checkpoint",
    "load_checkpoint",
    "GpiChoice",
    "gpi_select",
    "gpi_next_action",
    "epsilon_greedy",
    # Updates
    "ResidualVec",
    "UpdateReport",
    "bellman_residual",
    "full_gradient",
    "semi_gradient",
    "averaged_full_gradient",
    "dqn_gradient",
    "fgdqn_gradient",
    "joint_update",
    # Replay
    "ReplayBuffer",
    # Training and evaluation
    "train",
    "train_sequential",
    "train_randomized",
    "train_randomized_averaged",
    "train_baseline",
    "measure_overhead",
    "evaluate",
    # Results
    "compare_summary",
    "emit_plots",
    "run_gradcheck",
    # Client
    "ExperimentClient",
]
