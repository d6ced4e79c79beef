"""
Training configuration.

TrainConfig holds every knob of one run. Per-environment defaults come from
ENV_DEFAULTS; the shared ones (discount, exploration, step sizes, horizon,
buffer size, evaluation protocol) are the same for every environment.
"""

from dataclasses import asdict, dataclass, fields
from typing import Tuple

from fgsfrql.errors import ConfigurationError
from fgsfrql.models.constants import (
    DEFAULT_ALPHA,
    DEFAULT_ALPHA_R,
    DEFAULT_BUFFER_CAPACITY,
    DEFAULT_EPSILON,
    DEFAULT_EVAL_EPISODES,
    DEFAULT_EVAL_STEP_CAP,
    DEFAULT_GAMMA,
    DEFAULT_HORIZON,
    ENV_DEFAULTS,
    Algorithm,
    EnvName,
    LrSchedule,
)
from fgsfrql.validators import (
    validate_choice,
    validate_positive,
    validate_probability,
)

_INT_FIELDS = (
    "steps_per_task", "num_tasks", "batch_size", "horizon", "averaging_n",
    "buffer_capacity", "eval_episodes", "eval_step_cap", "log_every",
)


@dataclass
class TrainConfig:
    """Configuration of one training run.

    Attributes:
        env (str): Environment selector (EnvName)
        algorithm (str): Training algorithm (Algorithm)
        steps_per_task (int): Environment steps per task; randomized
            algorithms run steps_per_task * num_tasks iterations
        num_tasks (int): Number of tasks m
        batch_size (int): Replay minibatch size
        gamma (float): Discount
        epsilon (float): Exploration rate
        alpha (float): Network step size alpha_0
        alpha_r (float): Reward-model step size
        horizon (int): Maximum episode length
        seed (int): Root seed of the run
        averaging_n (int): Pivot batch size N of the averaged update
        lr_schedule (str): "constant" or "robbins_monro"
        hidden (tuple): Hidden layer widths
        buffer_capacity (int): Replay capacity
        layout_seed (int): Seed of environment layout randomness
        eval_episodes (int): Evaluation episodes per task
        eval_step_cap (int): Step cap of evaluation episodes
        log_every (int): Progress log period in steps
        record_timings (bool): Record update wall-clock time per step
        growing_n (bool): Grow N with the iteration count
        minibatch (bool): Train successor features on replay minibatches
        learn_rewards (bool): Learn reward weights instead of using the task's

    Example:
        >>> cfg = TrainConfig.for_env("point_maze_u", algorithm="sfdqn")
        >>> cfg.batch_size
        512
    """

    env: str = EnvName.FOUR_ROOMS
    algorithm: str = Algorithm.FG_SFDQN_ALG1
    steps_per_task: int = ENV_DEFAULTS[EnvName.FOUR_ROOMS]["steps_per_task"]
    num_tasks: int = ENV_DEFAULTS[EnvName.FOUR_ROOMS]["num_tasks"]
    batch_size: int = ENV_DEFAULTS[EnvName.FOUR_ROOMS]["batch_size"]
    gamma: float = DEFAULT_GAMMA
    epsilon: float = DEFAULT_EPSILON
    alpha: float = DEFAULT_ALPHA
    alpha_r: float = DEFAULT_ALPHA_R
    horizon: int = DEFAULT_HORIZON
    seed: int = 0
    averaging_n: int = 5
    lr_schedule: str = LrSchedule.CONSTANT
    hidden: Tuple[int, ...] = ENV_DEFAULTS[EnvName.FOUR_ROOMS]["hidden"]
    buffer_capacity: int = DEFAULT_BUFFER_CAPACITY
    layout_seed: int = 0
    eval_episodes: int = DEFAULT_EVAL_EPISODES
    eval_step_cap: int = DEFAULT_EVAL_STEP_CAP
    log_every: int = 1000
    record_timings: bool = False
    growing_n: bool = False
    minibatch: bool = False
    learn_rewards: bool = False

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def for_env(cls, env: str, **overrides) -> "TrainConfig":
        """Defaults for ``env`` with keyword overrides.

        Raises:
            ConfigurationError: If env is unknown
        """
        validate_choice("env", env, EnvName.ALL)
        values = dict(ENV_DEFAULTS[env])
        values.update(overrides)
        return cls(env=env, **values)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        """Build from a mapping such as a parsed config file.

        Missing keys take the defaults of the mapping's ``env``.

        Raises:
            ConfigurationError: On unknown keys or an invalid configuration
        """
        unknown = sorted(set(data) - set(cls.field_names()))
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {', '.join(unknown)}")
        values = dict(data)
        env = values.pop("env", EnvName.FOUR_ROOMS)
        config = cls.for_env(env, **values)
        config.validate()
        return config

    def validate(self) -> bool:
        """Check every field.

        Raises:
            ConfigurationError: If any field is out of range
        """
        validate_choice("env", self.env, EnvName.ALL)
        validate_choice("algorithm", self.algorithm, Algorithm.ALL)
        validate_choice("lr_schedule", self.lr_schedule, LrSchedule.ALL)
        for name in _INT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigurationError(f"{name} must be an integer, got {value!r}")
            validate_positive(name, value)
        for name in ("seed", "layout_seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ConfigurationError(f"{name} must be a non-negative integer, got {value!r}")
        validate_probability("gamma", self.gamma)
        if self.gamma >= 1.0:
            raise ConfigurationError(f"gamma must be < 1, got {self.gamma}")
        validate_probability("epsilon", self.epsilon)
        validate_positive("alpha", self.alpha, allow_zero=True)
        validate_positive("alpha_r", self.alpha_r, allow_zero=True)
        if not self.hidden or any(h <= 0 for h in self.hidden):
            raise ConfigurationError(f"hidden widths must be positive, got {self.hidden}")
        for name in ("record_timings", "growing_n", "minibatch", "learn_rewards"):
            if not isinstance(getattr(self, name), bool):
                raise ConfigurationError(f"{name} must be true or false")
        return True

    def json_dict(self):
        """Dictionary representation used for config echoes and files."""
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d
