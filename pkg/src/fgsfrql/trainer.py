"""
Training loops.

- train_sequential: tasks one after another with warm-started blocks; GPI
  over the tasks seen so far. Full-gradient (fg_sfdqn_alg1) or semi-gradient
  (sfdqn) updates on the active block and on the GPI-chosen block.
- train_randomized: all blocks exist from the start and a task is drawn
  uniformly every iteration (fg_sfdqn_alg2).
- train_randomized_averaged: as above, but each update uses N replayed
  transitions sharing a pivot (s, a) (fg_sfdqn_alg3).
- train_baseline: one warm-started scalar Q-network (dqn, fgdqn).
- measure_overhead: wall-clock cost of the update computation alone.

All randomness flows from one SeedSequence per run, so a configuration and
seed fully determine the RunRecord.
"""

import logging
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence

import numpy as np

from fgsfrql.environments import make_env, task_reward
from fgsfrql.errors import ConfigurationError, UsageError
from fgsfrql.evaluation import evaluate
from fgsfrql.gpi import (
    epsilon_greedy,
    gpi_next_action,
    gpi_select,
    gpi_select_batch,
    greedy_action,
    greedy_actions,
)
from fgsfrql.models.config import TrainConfig
from fgsfrql.models.constants import OVERHEAD_STUB, Algorithm
from fgsfrql.models.records import RunRecord, StepRow
from fgsfrql.models.tasks import Transition
from fgsfrql.network import sgd_step
from fgsfrql.replay import ReplayBuffer
from fgsfrql.schedules import averaging_size, step_size
from fgsfrql.successor import (
    QNet,
    new_library,
    new_qnet,
    reward_model_update,
    spawn_task,
)
from fgsfrql.updates import (
    averaged_full_gradient,
    batch_full_gradient,
    batch_semi_gradient,
    full_gradient,
    joint_update,
    mean_target_state,
    q_batch_gradient,
    semi_gradient,
)

logger = logging.getLogger(__name__)

_SEED_BOUND = 2 ** 31
# Transitions collected with random actions before overhead timing starts.
OVERHEAD_WARMUP_STEPS = 1_000
# Timed calls allowed per requested step before measure_overhead gives up.
OVERHEAD_MAX_ATTEMPTS = 10


@dataclass
class RandomStreams:
    """Independent generators of one run, spawned from its seed."""

    init_seed: int
    behaviour: np.random.Generator
    env: np.random.Generator
    replay: np.random.Generator
    tasks: np.random.Generator
    evaluation: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        init, behaviour, env, replay, tasks, evaluation = np.random.SeedSequence(seed).spawn(6)
        return cls(
            init_seed=int(init.generate_state(1)[0]),
            behaviour=np.random.default_rng(behaviour),
            env=np.random.default_rng(env),
            replay=np.random.default_rng(replay),
            tasks=np.random.default_rng(tasks),
            evaluation=np.random.default_rng(evaluation),
        )


class Trainer:
    """Owns the environment, random streams and step log of one run.

    Args:
        config (TrainConfig): Run configuration; validated on construction

    Raises:
        ConfigurationError: If the configuration is invalid or asks for more
            tasks than the environment defines
    """

    def __init__(self, config: TrainConfig):
        config.validate()
        self.config = config
        self.env = make_env(config.env, config.layout_seed, config.horizon)
        if config.num_tasks > len(self.env.tasks):
            raise ConfigurationError(
                f"{config.env} defines {len(self.env.tasks)} tasks, num_tasks is {config.num_tasks}"
            )
        self.tasks = self.env.tasks[:config.num_tasks]
        self.streams = RandomStreams.from_seed(config.seed)

        self.rows = []
        self._cumulative = defaultdict(float)
        self._task_steps = Counter()
        self._transfers = Counter()
        self._obs = None
        self._episode_steps = 0
        self.episodes = 0
        self.updates = 0
        self.pivots_drawn = 0
        self.pivots_skipped = 0

    # ===== ENVIRONMENT =====

    def _select_task(self, task_id: int, new_episode: bool) -> None:
        self.env.set_task(task_id)
        if new_episode:
            self._obs = None
        elif self._obs is not None:
            # observations may carry task information (maze goals)
            self._obs = self.env.observe()

    def _current(self) -> np.ndarray:
        if self._obs is None:
            self._obs = self.env.reset(seed=int(self.streams.env.integers(_SEED_BOUND)))
            self._episode_steps = 0
            self.episodes += 1
        return self._obs

    def _step(self, task_id: int, action: int) -> Transition:
        s = self._current()
        s_next, features, terminal = self.env.step(action)
        t = Transition(
            s=s,
            a=int(action),
            r=task_reward(self.tasks[task_id], features),
            s_next=s_next,
            features=features,
            terminal=terminal,
            task_id=task_id,
            pivot_key=self.env.pivot_key(s, action),
        )
        self._episode_steps += 1
        if terminal or self._episode_steps >= self.config.horizon:
            self._obs = None
        else:
            self._obs = s_next
        return t

    # ===== LOGGING =====

    def _log(self, t: Transition, report, chosen_policy: int, elapsed_ns: int) -> None:
        self._cumulative[t.task_id] += t.r
        self._task_steps[t.task_id] += 1
        if chosen_policy >= 0 and chosen_policy != t.task_id:
            self._transfers[t.task_id] += 1
        self.rows.append(StepRow(
            step=len(self.rows),
            task_id=t.task_id,
            reward=float(t.r),
            cumulative_task_reward=float(self._cumulative[t.task_id]),
            residual_norm=report.residual_norm if report is not None else 0.0,
            batch_msbe=report.batch_msbe if report is not None else 0.0,
            chosen_policy=int(chosen_policy),
            wall_clock_ns=int(elapsed_ns) if self.config.record_timings else 0,
        ))
        step = len(self.rows)
        if step % self.config.log_every == 0:
            logger.info("step %d task %d cumulative reward %.4f msbe %.4g",
                        step, t.task_id, self._cumulative[t.task_id], self.rows[-1].batch_msbe)

    def _alpha(self) -> float:
        return step_size(self.config.lr_schedule, self.config.alpha, self.updates)

    def _stats(self):
        stats = {
            "episodes": self.episodes,
            "updates": self.updates,
            "gpi_transfer_rate": {
                str(task_id): self._transfers[task_id] / count
                for task_id, count in sorted(self._task_steps.items())
            },
        }
        if self.config.algorithm == Algorithm.FG_SFDQN_ALG3:
            stats["pivots_drawn"] = self.pivots_drawn
            stats["pivots_skipped"] = self.pivots_skipped
            stats["skip_rate"] = self.pivots_skipped / self.pivots_drawn if self.pivots_drawn else 0.0
        return stats

    def _record(self, model) -> RunRecord:
        eval_env = make_env(self.config.env, self.config.layout_seed, self.config.horizon)
        evaluations = evaluate(model, eval_env, self.tasks, self.config.eval_episodes,
                               self.config.eval_step_cap, self.streams.evaluation)
        return RunRecord(self.config, self.rows, evaluations, self._stats(), model)

    def _apply_reward_learning(self, lib, t: Transition, task_id: int):
        if not self.config.learn_rewards:
            return lib
        model = reward_model_update(lib.reward_models[task_id], t.features, t.r, self.config.alpha_r)
        return lib.with_reward_model(task_id, model)

    # ===== UPDATES =====

    def _joint_step(self, lib, i, c, a_hat, s_next, gradient, shared_action=False):
        """Update block i with a_hat and, when c != i, block c.

        Block c bootstraps from its own greedy action at s_next, or from
        a_hat itself when ``shared_action`` is set.
        ``gradient(net, action)`` returns the UpdateReport of one block.
        """
        grads = {i: gradient(lib.xi_nets[i], a_hat)}
        if c != i:
            if shared_action:
                a_c = a_hat
            else:
                a_c = greedy_action(lib.xi_nets[c], s_next, lib.reward_models[c])
            grads[c] = gradient(lib.xi_nets[c], a_c)
        lib = joint_update(lib, i, c, grads, self._alpha())
        self.updates += 1
        return lib, grads[i]

    def sequential_update(self, lib, t: Transition, i: int, c: int, full: bool):
        """Online update of blocks i and c on one transition."""
        gamma_t = t.gamma_t(self.config.gamma)
        rule = full_gradient if full else semi_gradient
        a_hat = gpi_next_action(lib, t.s_next, lib.reward_models[i], i + 1)
        return self._joint_step(lib, i, c, a_hat, t.s_next, lambda net, a: rule(net, t, a, gamma_t))

    def minibatch_update(self, lib, buffer: ReplayBuffer, i: int, c: int, full: bool):
        """Replay-minibatch update of blocks i and c."""
        batch = buffer.sample(self.config.batch_size, self.streams.replay)
        rule = batch_full_gradient if full else batch_semi_gradient
        next_states = np.stack([t.s_next for t in batch])
        _, a_hats = gpi_select_batch(lib, next_states, lib.reward_models[i], i + 1)
        grads = {i: rule(lib.xi_nets[i], batch, a_hats, self.config.gamma)}
        if c != i:
            a_c = greedy_actions(lib.xi_nets[c], next_states, lib.reward_models[c])
            grads[c] = rule(lib.xi_nets[c], batch, a_c, self.config.gamma)
        lib = joint_update(lib, i, c, grads, self._alpha())
        self.updates += 1
        return lib, grads[i]

    def randomized_update(self, lib, t: Transition, i: int):
        """Full-gradient update where c and a_hat come from GPI at s'."""
        gamma_t = t.gamma_t(self.config.gamma)
        choice = gpi_select(lib, t.s_next, lib.reward_models[i])
        lib, report = self._joint_step(lib, i, choice.policy_index, choice.action, t.s_next,
                                       lambda net, a: full_gradient(net, t, a, gamma_t))
        return lib, report, choice.policy_index

    def averaged_update(self, lib, buffer: ReplayBuffer, i: int, k: int):
        """Averaged full-gradient update on a replayed pivot; skipped when its bucket is short.

        Blocks i and c both bootstrap from the GPI action at the mean next state.

        Returns (library, report or None, chosen policy or -1).
        """
        n = averaging_size(self.config.averaging_n, k, self.config.growing_n)
        key = buffer.sample_pivot_key(self.streams.replay)
        batch = buffer.sample_pivot_batch(key, n, self.streams.replay)
        self.pivots_drawn += 1
        if len(batch) < n:
            self.pivots_skipped += 1
            logger.debug("Pivot bucket holds %d < %d transitions; update skipped", len(batch), n)
            return lib, None, -1
        s_bar = mean_target_state(batch)
        choice = gpi_select(lib, s_bar, lib.reward_models[i])
        pivot = (batch[0].s, batch[0].a)
        gamma = self.config.gamma
        lib, report = self._joint_step(lib, i, choice.policy_index, choice.action, s_bar,
                                       lambda net, a: averaged_full_gradient(net, pivot, batch, a, gamma),
                                       shared_action=True)
        return lib, report, choice.policy_index

    def baseline_update(self, qnet: QNet, buffer: ReplayBuffer, full: bool):
        batch = buffer.sample(self.config.batch_size, self.streams.replay)
        report = q_batch_gradient(qnet, batch, self.config.gamma, full)
        params = sgd_step(qnet.params, report.grad, self._alpha())
        self.updates += 1
        return QNet(params, qnet.num_actions), report

    def _timed(self, fn):
        if not self.config.record_timings:
            return fn(), 0
        start = time.perf_counter_ns()
        result = fn()
        return result, time.perf_counter_ns() - start

    # ===== LOOPS =====

    def new_library(self):
        env = self.env
        return new_library(env.observation_dim, env.num_actions, env.feature_dim,
                           self.config.hidden, self.streams.init_seed)

    def run_sequential(self) -> RunRecord:
        cfg = self.config
        full = cfg.algorithm != Algorithm.SFDQN
        lib = self.new_library()
        buffer = ReplayBuffer(cfg.buffer_capacity) if cfg.minibatch else None

        for i, task in enumerate(self.tasks):
            lib = spawn_task(lib, task, warm_start=True, learned=cfg.learn_rewards)
            self._select_task(i, new_episode=True)
            logger.info("Task %d/%d started (%s)", i + 1, len(self.tasks), cfg.algorithm)
            for _ in range(cfg.steps_per_task):
                s = self._current()
                choice = gpi_select(lib, s, lib.reward_models[i], i + 1)
                a = epsilon_greedy(choice.action, cfg.epsilon, self.env.num_actions, self.streams.behaviour)
                t = self._step(i, a)
                lib = self._apply_reward_learning(lib, t, i)
                c = choice.policy_index
                if buffer is not None:
                    buffer.push(t)
                    (lib, report), elapsed = self._timed(lambda: self.minibatch_update(lib, buffer, i, c, full))
                else:
                    (lib, report), elapsed = self._timed(lambda: self.sequential_update(lib, t, i, c, full))
                self._log(t, report, c, elapsed)
        return self._record(lib)

    def run_randomized(self, averaged: bool = False) -> RunRecord:
        cfg = self.config
        m = len(self.tasks)
        lib = self.new_library()
        for task in self.tasks:
            lib = spawn_task(lib, task, warm_start=False, learned=cfg.learn_rewards)
        buffer = ReplayBuffer(cfg.buffer_capacity)

        logger.info("Randomized training over %d tasks (%s)", m, cfg.algorithm)
        for k in range(cfg.steps_per_task * m):
            i = int(self.streams.tasks.integers(m))
            self._select_task(i, new_episode=False)
            s = self._current()
            choice = gpi_select(lib, s, lib.reward_models[i])
            a = epsilon_greedy(choice.action, cfg.epsilon, self.env.num_actions, self.streams.behaviour)
            t = self._step(i, a)
            lib = self._apply_reward_learning(lib, t, i)
            buffer.push(t)
            if averaged:
                (lib, report, c), elapsed = self._timed(lambda: self.averaged_update(lib, buffer, i, k))
            else:
                (lib, report, c), elapsed = self._timed(lambda: self.randomized_update(lib, t, i))
            self._log(t, report, c, elapsed)
        return self._record(lib)

    def run_baseline(self) -> RunRecord:
        cfg = self.config
        full = cfg.algorithm == Algorithm.FGDQN
        env = self.env
        qnet = new_qnet(env.observation_dim, env.num_actions, cfg.hidden, self.streams.init_seed)
        buffer = ReplayBuffer(cfg.buffer_capacity)

        for i in range(len(self.tasks)):
            # stored rewards belong to the previous task
            buffer.clear()
            self._select_task(i, new_episode=True)
            logger.info("Task %d/%d started (%s)", i + 1, len(self.tasks), cfg.algorithm)
            for _ in range(cfg.steps_per_task):
                s = self._current()
                greedy = int(np.argmax(qnet.values(s)))
                a = epsilon_greedy(greedy, cfg.epsilon, env.num_actions, self.streams.behaviour)
                t = self._step(i, a)
                buffer.push(t)
                (qnet, report), elapsed = self._timed(lambda: self.baseline_update(qnet, buffer, full))
                self._log(t, report, 0, elapsed)
        return self._record(qnet)

    def run(self) -> RunRecord:
        """Run the loop matching the configured algorithm."""
        algorithm = self.config.algorithm
        if algorithm in Algorithm.SEQUENTIAL:
            return self.run_sequential()
        if algorithm == Algorithm.FG_SFDQN_ALG2:
            return self.run_randomized(averaged=False)
        if algorithm == Algorithm.FG_SFDQN_ALG3:
            return self.run_randomized(averaged=True)
        return self.run_baseline()


def _require(cfg: TrainConfig, allowed: Sequence[str], loop: str):
    if cfg.algorithm not in allowed:
        raise ConfigurationError(f"{loop} runs {list(allowed)}, not {cfg.algorithm!r}")


def train_sequential(cfg: TrainConfig) -> RunRecord:
    """Sequential tasks with warm starts (sfdqn, fg_sfdqn_alg1)."""
    _require(cfg, Algorithm.SEQUENTIAL, "train_sequential")
    return Trainer(cfg).run_sequential()


def train_randomized(cfg: TrainConfig) -> RunRecord:
    """Uniformly sampled tasks (fg_sfdqn_alg2)."""
    _require(cfg, (Algorithm.FG_SFDQN_ALG2,), "train_randomized")
    return Trainer(cfg).run_randomized(averaged=False)


def train_randomized_averaged(cfg: TrainConfig) -> RunRecord:
    """Uniformly sampled tasks with pivot-averaged updates (fg_sfdqn_alg3)."""
    _require(cfg, (Algorithm.FG_SFDQN_ALG3,), "train_randomized_averaged")
    return Trainer(cfg).run_randomized(averaged=True)


def train_baseline(cfg: TrainConfig) -> RunRecord:
    """Warm-started scalar Q-network (dqn, fgdqn)."""
    _require(cfg, Algorithm.BASELINES, "train_baseline")
    return Trainer(cfg).run_baseline()


def train(cfg: TrainConfig) -> RunRecord:
    """Dispatch on cfg.algorithm."""
    return Trainer(cfg).run()


# ===== OVERHEAD =====

@dataclass(frozen=True)
class OverheadStats:
    """Per-step update time in milliseconds."""

    algorithm: str
    mean_ms: float
    variance_ms: float
    n_steps: int
    skipped: int = 0

    def json_dict(self):
        return {
            "algorithm": self.algorithm,
            "mean_ms": self.mean_ms,
            "variance_ms": self.variance_ms,
            "n_steps": self.n_steps,
            "skipped": self.skipped,
        }


def _warm_buffer(trainer: Trainer, steps: int, repeats: int = 1) -> ReplayBuffer:
    """Buffer of random-action transitions on the last task, each pushed ``repeats`` times."""
    buffer = ReplayBuffer(max(trainer.config.buffer_capacity, steps * repeats))
    task_id = len(trainer.tasks) - 1
    trainer._select_task(task_id, new_episode=True)
    for _ in range(steps):
        trainer._current()
        a = int(trainer.streams.behaviour.integers(trainer.env.num_actions))
        t = trainer._step(task_id, a)
        for _ in range(repeats):
            buffer.push(t)
    return buffer


def _overhead_update(trainer: Trainer, algorithm: str, buffer: ReplayBuffer):
    """Return a zero-argument callable performing one update of ``algorithm``."""
    if algorithm == OVERHEAD_STUB:
        return lambda: None

    env = trainer.env
    if algorithm in Algorithm.BASELINES:
        qnet = new_qnet(env.observation_dim, env.num_actions, trainer.config.hidden, trainer.streams.init_seed)
        full = algorithm == Algorithm.FGDQN
        return lambda: trainer.baseline_update(qnet, buffer, full)

    lib = trainer.new_library()
    for task in trainer.tasks:
        lib = spawn_task(lib, task, warm_start=False)
    i = len(trainer.tasks) - 1

    if algorithm == Algorithm.FG_SFDQN_ALG3:
        return lambda: trainer.averaged_update(lib, buffer, i, 0)

    def one_transition():
        return buffer.sample(1, trainer.streams.replay)[0]

    if algorithm == Algorithm.FG_SFDQN_ALG2:
        return lambda: trainer.randomized_update(lib, one_transition(), i)

    full = algorithm != Algorithm.SFDQN

    def sequential():
        t = one_transition()
        c = gpi_select(lib, t.s, lib.reward_models[i]).policy_index
        return trainer.sequential_update(lib, t, i, c, full)
    return sequential


def measure_overhead(cfg: TrainConfig, n_steps: int,
                     algorithms: Optional[Sequence[str]] = None) -> Dict[str, OverheadStats]:
    """Time the update computation of each algorithm on a warm buffer.

    Every algorithm gets a full library (or Q-network) for cfg's tasks and
    a buffer of random-action transitions; only the update call is timed.
    For fg_sfdqn_alg3 each transition is pushed N times so every pivot bucket
    can feed an averaged update; calls that still skip are counted in
    ``skipped`` and left out of the timing.
    ``"noop"`` times an empty call and serves as a floor.

    Raises:
        ConfigurationError: If an algorithm name is unknown or n_steps < 1
        UsageError: If fewer than n_steps updates ran within the attempt limit
    """
    if n_steps < 1:
        raise ConfigurationError(f"n_steps must be >= 1, got {n_steps}")
    algorithms = list(algorithms or Algorithm.ALL)
    results = {}
    for algorithm in algorithms:
        if algorithm != OVERHEAD_STUB and algorithm not in Algorithm.ALL:
            raise ConfigurationError(f"Unknown algorithm {algorithm!r}")
        run_cfg = cfg if algorithm == OVERHEAD_STUB else replace(cfg, algorithm=algorithm)
        trainer = Trainer(run_cfg)
        repeats = 1
        if algorithm == Algorithm.FG_SFDQN_ALG3:
            repeats = averaging_size(cfg.averaging_n, 0, cfg.growing_n)
        buffer = _warm_buffer(trainer, max(OVERHEAD_WARMUP_STEPS, cfg.batch_size), repeats)
        update = _overhead_update(trainer, algorithm, buffer)
        samples = []
        skipped = 0
        for _ in range(OVERHEAD_MAX_ATTEMPTS * n_steps):
            if len(samples) == n_steps:
                break
            before = trainer.pivots_skipped
            start = time.perf_counter_ns()
            update()
            elapsed = (time.perf_counter_ns() - start) / 1e6
            if trainer.pivots_skipped > before:
                skipped += 1
                continue
            samples.append(elapsed)
        if len(samples) < n_steps:
            raise UsageError(f"{algorithm}: only {len(samples)} of {n_steps} updates ran, {skipped} skipped")
        samples = np.asarray(samples)
        results[algorithm] = OverheadStats(algorithm, float(samples.mean()), float(samples.var()),
                                           n_steps, skipped)
        logger.info("%s: %.4f ms/step (var %.4g, %d skipped)", algorithm, results[algorithm].mean_ms,
                    results[algorithm].variance_ms, skipped)
    return results
