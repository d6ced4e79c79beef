"""
Successor feature machinery.

- XiNet: a network whose output reshapes to an |A| x d_phi matrix, the
  successor features xi(s, a, .) of one policy
- QNet: scalar Q head used by the DQN baselines
- RewardModel: linear reward weights, provided or learned
- PolicyLibrary: one XiNet and one RewardModel per task seen so far

Q-values are reconstructed as Q(s, a) = xi(s, a, .) . w. Libraries are
values: every operation that changes one returns a new library and leaves
the blocks it did not touch as the very same objects.
"""

import json
import logging
import zipfile
from dataclasses import dataclass, field, replace
from io import BytesIO
from typing import Optional, Sequence, Tuple

import numpy as np

from fgsfrql.errors import ConfigurationError, InputError, ShapeError, UsageError
from fgsfrql.models.tasks import TaskSpec
from fgsfrql.network import ParamVector, net_forward, net_init
from fgsfrql.utils import bytes_digest
from fgsfrql.validators import validate_positive, validate_width

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1
# Fixed zip member timestamp so identical libraries give identical archives.
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)
# Range of the initial learned reward weights.
REWARD_INIT_SCALE = 0.01


@dataclass(frozen=True)
class XiNet:
    """Successor feature network of one policy.

    Attributes:
        params (ParamVector): Network parameters; output width num_actions * feature_dim
        num_actions (int): |A|
        feature_dim (int): d_phi
    """

    params: ParamVector
    num_actions: int
    feature_dim: int

    def __post_init__(self):
        if self.params.output_width != self.num_actions * self.feature_dim:
            raise ShapeError(
                f"Xi output width {self.params.output_width} is not "
                f"{self.num_actions} actions x {self.feature_dim} features"
            )


@dataclass(frozen=True)
class QNet:
    """Scalar action-value network with one output per action."""

    params: ParamVector
    num_actions: int

    def __post_init__(self):
        if self.params.output_width != self.num_actions:
            raise ShapeError(f"Q output width {self.params.output_width} is not {self.num_actions} actions")

    def values(self, s) -> np.ndarray:
        return net_forward(self.params, s)


@dataclass(frozen=True)
class RewardModel:
    """Linear reward model R(phi) = phi . weights.

    Attributes:
        weights (np.ndarray): Read-only weights of width d_phi
        learned (bool): False when the weights were provided by the task
    """

    weights: np.ndarray
    learned: bool = False

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(weights)):
            raise ConfigurationError("Reward weights must be finite")
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)

    @property
    def feature_dim(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class PolicyLibrary:
    """Joint parameters of all task blocks plus their reward models.

    Attributes:
        layout (tuple): Xi network layout shared by every block
        num_actions (int): |A|
        feature_dim (int): d_phi
        seed (int): Root seed of block initialization
        xi_nets (tuple): One XiNet per task index, in task order
        reward_models (tuple): One RewardModel per task index

    Example:
        >>> lib = new_library(observation_dim=38, num_actions=4, feature_dim=4,
        ...                   hidden=(64, 64), seed=1)
        >>> lib.active_count
        0
    """

    layout: Tuple[int, ...]
    num_actions: int
    feature_dim: int
    seed: int = 0
    xi_nets: Tuple[XiNet, ...] = field(default_factory=tuple)
    reward_models: Tuple[RewardModel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "xi_nets", tuple(self.xi_nets))
        object.__setattr__(self, "reward_models", tuple(self.reward_models))
        if len(self.xi_nets) != len(self.reward_models):
            raise UsageError("Library has mismatched xi networks and reward models")

    @property
    def active_count(self) -> int:
        return len(self.xi_nets)

    def with_block(self, index: int, net: XiNet) -> "PolicyLibrary":
        """Return a library whose block ``index`` is replaced by ``net``."""
        nets = list(self.xi_nets)
        nets[index] = net
        return replace(self, xi_nets=tuple(nets))

    def with_reward_model(self, index: int, model: RewardModel) -> "PolicyLibrary":
        models = list(self.reward_models)
        models[index] = model
        return replace(self, reward_models=tuple(models))

    def block_seed(self, task_id: int) -> int:
        """Initialization seed of block ``task_id``, derived from the library seed."""
        return int(np.random.SeedSequence([self.seed, task_id]).generate_state(1)[0])


def xi_layout(observation_dim: int, hidden: Sequence[int], num_actions: int, feature_dim: int):
    return (int(observation_dim), *(int(h) for h in hidden), int(num_actions) * int(feature_dim))


def new_library(observation_dim: int, num_actions: int, feature_dim: int,
                hidden: Sequence[int], seed: int = 0) -> PolicyLibrary:
    """Empty library for the given problem sizes."""
    layout = xi_layout(observation_dim, hidden, num_actions, feature_dim)
    return PolicyLibrary(layout=layout, num_actions=num_actions, feature_dim=feature_dim, seed=seed)


def new_qnet(observation_dim: int, num_actions: int, hidden: Sequence[int], seed: int) -> QNet:
    layout = (int(observation_dim), *(int(h) for h in hidden), int(num_actions))
    return QNet(net_init(layout, seed), num_actions)


def xi_eval(net: XiNet, s) -> np.ndarray:
    """Successor features at s as an |A| x d_phi matrix.

    A batch of observations (rows) gives a [batch, |A|, d_phi] array.

    Raises:
        ShapeError: If the observation width does not match the network
    """
    out = net_forward(net.params, s)
    return out.reshape(out.shape[:-1] + (net.num_actions, net.feature_dim))


def q_from_xi(xi_matrix, reward: RewardModel) -> np.ndarray:
    """Q-values over actions: xi (|A| x d_phi) times the reward weights.

    Raises:
        ShapeError: If the feature widths differ
    """
    xi_matrix = np.asarray(xi_matrix, dtype=np.float64)
    validate_width("xi matrix", xi_matrix, reward.feature_dim)
    return xi_matrix @ reward.weights


def reward_model_update(model: RewardModel, phi_t, r_t: float, alpha_r: float) -> RewardModel:
    """One SGD step on (r_t - w . phi_t)^2.

    w <- w + 2 alpha_r (r_t - w . phi_t) phi_t

    Raises:
        UsageError: If the model's weights were provided rather than learned
        ShapeError: If phi_t has the wrong width
    """
    if not model.learned:
        raise UsageError("Cannot update a provided reward model")
    validate_width("phi_t", phi_t, model.feature_dim)
    validate_positive("alpha_r", alpha_r, allow_zero=True)
    phi_t = np.asarray(phi_t, dtype=np.float64)
    error = float(r_t) - float(model.weights @ phi_t)
    return RewardModel(model.weights + 2.0 * alpha_r * error * phi_t, learned=True)


def spawn_task(lib: PolicyLibrary, task: TaskSpec, warm_start: bool,
               learned: bool = False) -> PolicyLibrary:
    """Append a block for ``task``.

    With ``warm_start`` the new block copies the previous block's current
    parameters; the first block is always freshly initialized. A learned
    reward model starts from small uniform weights, otherwise the task's
    weights are used as given.

    Raises:
        UsageError: If task.task_id is not the next contiguous index
        ShapeError: If the task's feature width differs from the library's
    """
    if task.task_id != lib.active_count:
        raise UsageError(f"Expected task id {lib.active_count}, got {task.task_id}")
    if task.feature_dim != lib.feature_dim:
        raise ShapeError(f"Task {task.task_id} has {task.feature_dim} features, library has {lib.feature_dim}")

    if warm_start and lib.active_count > 0:
        params = lib.xi_nets[-1].params
        logger.debug("Task %d warm-started from task %d", task.task_id, lib.active_count - 1)
    else:
        params = net_init(lib.layout, lib.block_seed(task.task_id))

    if learned:
        rng = np.random.default_rng([lib.seed, task.task_id, 1])
        reward = RewardModel(rng.uniform(-REWARD_INIT_SCALE, REWARD_INIT_SCALE, lib.feature_dim), learned=True)
    else:
        reward = RewardModel(task.reward_weights, learned=False)

    return replace(
        lib,
        xi_nets=lib.xi_nets + (XiNet(params, lib.num_actions, lib.feature_dim),),
        reward_models=lib.reward_models + (reward,),
    )


# ===== CHECKPOINTS =====

def _write_member(zf, name, data):
    info = zipfile.ZipInfo(name, date_time=_ZIP_EPOCH)
    info.compress_type = zipfile.ZIP_DEFLATED
    zf.writestr(info, data)


def _write_archive(files, manifest, zip_file):
    manifest["files"] = {name: bytes_digest(data) for name, data in sorted(files.items())}
    if zip_file is None:
        zip_file = BytesIO()
    with zipfile.ZipFile(zip_file, "w") as zf:
        _write_member(zf, "manifest.json", json.dumps(manifest, indent=2, sort_keys=True))
        for name, data in sorted(files.items()):
            _write_member(zf, name, data)
    return zip_file


def save_checkpoint(model, zip_file=None):
    """Write a PolicyLibrary or QNet to a zip archive.

    The archive holds ``manifest.json`` (kind, sizes, task ids and the
    SHA-256 digest of every other member) plus one ParamVector payload per
    block and, for libraries, the reward weights.

    Args:
        model (PolicyLibrary or QNet): What to save
        zip_file (str/BytesIO, optional): Output path or buffer

    Returns:
        The zip destination (a new BytesIO when none was given)
    """
    if isinstance(model, PolicyLibrary):
        files = {f"blocks/{k:03d}.bin": net.params.to_bytes() for k, net in enumerate(model.xi_nets)}
        weights = np.stack([m.weights for m in model.reward_models]) if model.reward_models \
            else np.zeros((0, model.feature_dim))
        files["rewards.bin"] = np.ascontiguousarray(weights, dtype='<f8').tobytes()
        manifest = {
            "format_version": CHECKPOINT_FORMAT_VERSION,
            "kind": "library",
            "task_ids": list(range(model.active_count)),
            "feature_dim": model.feature_dim,
            "num_actions": model.num_actions,
            "layout": list(model.layout),
            "seed": model.seed,
            "learned": [m.learned for m in model.reward_models],
        }
    elif isinstance(model, QNet):
        files = {"blocks/000.bin": model.params.to_bytes()}
        manifest = {
            "format_version": CHECKPOINT_FORMAT_VERSION,
            "kind": "qnet",
            "num_actions": model.num_actions,
            "layout": list(model.params.layout),
        }
    else:
        raise UsageError(f"Cannot checkpoint {type(model).__name__}")
    return _write_archive(files, manifest, zip_file)


def load_checkpoint(zip_file):
    """Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        InputError: If a member is missing or its digest does not match
    """
    try:
        with zipfile.ZipFile(zip_file, "r") as zf:
            manifest = json.loads(zf.read("manifest.json").decode("utf-8"))
            files = {name: zf.read(name) for name in manifest.get("files", {})}
    except (KeyError, zipfile.BadZipFile, json.JSONDecodeError) as exc:
        raise InputError(f"Unreadable checkpoint: {exc}")

    for name, digest in manifest["files"].items():
        if bytes_digest(files[name]) != digest:
            raise InputError(f"Checkpoint member {name} failed its SHA-256 check")

    if manifest.get("kind") == "qnet":
        return QNet(ParamVector.from_bytes(files["blocks/000.bin"]), manifest["num_actions"])

    feature_dim = int(manifest["feature_dim"])
    num_actions = int(manifest["num_actions"])
    task_ids = manifest["task_ids"]
    weights = np.frombuffer(files["rewards.bin"], dtype='<f8').reshape(len(task_ids), feature_dim)
    nets = [XiNet(ParamVector.from_bytes(files[f"blocks/{k:03d}.bin"]), num_actions, feature_dim)
            for k in task_ids]
    models = [RewardModel(weights[k], learned=bool(flag)) for k, flag in enumerate(manifest["learned"])]
    return PolicyLibrary(
        layout=tuple(manifest["layout"]),
        num_actions=num_actions,
        feature_dim=feature_dim,
        seed=int(manifest.get("seed", 0)),
        xi_nets=tuple(nets),
        reward_models=tuple(models),
    )
