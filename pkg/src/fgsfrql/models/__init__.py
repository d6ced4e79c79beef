"""
fg-sfrql - Models Module

This module contains the plain data records and constants shared across
the library: algorithm and environment names, tasks and transitions,
training configuration, run records and experiment suites.
"""

from .constants import (
    Algorithm,
    EnvName,
    LrSchedule,
    PlotKind,
)
from .tasks import (
    TaskSpec,
    Transition,
)
from .config import TrainConfig
from .records import (
    StepRow,
    TaskEvaluation,
    RunRecord,
    LoadedRun,
    load_run,
    record_handler,
)
from .suite import (
    ExperimentSuite,
    PlotSpec,
)

__all__ = [
    # Constants
    "Algorithm",
    "EnvName",
    "LrSchedule",
    "PlotKind",
    # Tasks
    "TaskSpec",
    "Transition",
    # Configuration
    "TrainConfig",
    # Records
    "StepRow",
    "TaskEvaluation",
    "RunRecord",
    "LoadedRun",
    "load_run",
    "record_handler",
    # Suites
    "ExperimentSuite",
    "PlotSpec",
]
