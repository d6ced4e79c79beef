"""
Finite-difference verification of every analytic gradient rule.

run_gradcheck draws random small networks and transitions and compares
each rule against central differences of the loss it claims to
differentiate. Errors are norm-wise relative errors:

    ||g - g_fd|| / max(||g||, ||g_fd||)

It also checks the decomposition full = semi + bootstrap term elementwise.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from fgsfrql.models.tasks import Transition
from fgsfrql.network import finite_diff_grad, net_backward, net_forward, net_init
from fgsfrql.successor import QNet, XiNet, xi_eval
from fgsfrql.updates import (
    averaged_full_gradient,
    bellman_residual,
    fgdqn_gradient,
    full_gradient,
    semi_gradient,
)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6
DECOMPOSITION_TOLERANCE = 1e-10
GAMMA = 0.95
PIVOT_KEY = b"pivot"


def relative_error(analytic, numeric) -> float:
    """Norm-wise relative error of two gradients."""
    a = np.asarray(analytic.values)
    b = np.asarray(numeric.values)
    scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)
    return float(np.linalg.norm(a - b) / scale)


@dataclass
class CheckResult:
    """Worst error of one check over its trials."""

    name: str
    max_error: float = 0.0
    trials: int = 0

    def add(self, error: float) -> None:
        self.max_error = max(self.max_error, error)
        self.trials += 1

    def json_dict(self):
        return {"name": self.name, "max_error": self.max_error, "trials": self.trials}


@dataclass
class GradcheckReport:
    """All checks of one run_gradcheck call."""

    tolerance: float
    decomposition_tolerance: float
    checks: Dict[str, CheckResult] = field(default_factory=dict)

    @property
    def max_relative_error(self) -> float:
        return max(c.max_error for name, c in self.checks.items() if name != "decomposition")

    @property
    def passed(self) -> bool:
        gradients_ok = self.max_relative_error <= self.tolerance
        decomposition = self.checks.get("decomposition")
        return gradients_ok and (decomposition is None or decomposition.max_error <= self.decomposition_tolerance)

    def text(self) -> str:
        lines = [f"{'check':<22} {'trials':>6} {'max error':>12}"]
        for check in self.checks.values():
            lines.append(f"{check.name:<22} {check.trials:>6} {check.max_error:>12.3e}")
        lines.append(f"max relative error: {self.max_relative_error:.3e} "
                     f"({'PASS' if self.passed else 'FAIL'}, tolerance {self.tolerance:g})")
        return "\n".join(lines)

    def json_dict(self):
        return {
            "tolerance": self.tolerance,
            "decomposition_tolerance": self.decomposition_tolerance,
            "max_relative_error": self.max_relative_error,
            "passed": self.passed,
            "checks": [c.json_dict() for c in self.checks.values()],
        }


def random_problem(rng):
    """Random (observation_dim, num_actions, feature_dim, layout) with depth <= 3 and widths <= 16."""
    obs_dim = int(rng.integers(2, 7))
    num_actions = int(rng.integers(2, 5))
    feature_dim = int(rng.integers(1, 5))
    hidden = [int(h) for h in rng.integers(2, 9, size=int(rng.integers(0, 3)))]
    return obs_dim, num_actions, feature_dim, (obs_dim, *hidden, num_actions * feature_dim)


def random_transition(rng, obs_dim, num_actions, feature_dim, s=None, a=None, terminal=False, key=PIVOT_KEY):
    return Transition(
        s=rng.normal(size=obs_dim) if s is None else s,
        a=int(rng.integers(num_actions)) if a is None else a,
        r=float(rng.normal()),
        s_next=rng.normal(size=obs_dim),
        features=rng.uniform(0.0, 1.0, size=feature_dim),
        terminal=terminal,
        task_id=0,
        pivot_key=key,
    )


def _residual_loss(t, a_hat, gamma_t, num_actions, feature_dim):
    def loss(params):
        delta = bellman_residual(XiNet(params, num_actions, feature_dim), t, a_hat, gamma_t).delta
        return float(delta @ delta)
    return loss


def _averaged_loss(batch, a_hat, gamma, num_actions, feature_dim):
    s, a = batch[0].s, batch[0].a
    phis = np.stack([t.features for t in batch])
    next_states = np.stack([t.s_next for t in batch])
    gammas = np.array([t.gamma_t(gamma) for t in batch])

    def loss(params):
        net = XiNet(params, num_actions, feature_dim)
        targets = phis + gammas[:, np.newaxis] * xi_eval(net, next_states)[:, a_hat, :]
        delta = targets.mean(axis=0) - xi_eval(net, s)[a]
        return float(delta @ delta)
    return loss


def _fgdqn_loss(t, gamma_t, a_star):
    def loss(params):
        q_s = net_forward(params, t.s)
        q_next = net_forward(params, t.s_next)
        delta = t.r + gamma_t * q_next[a_star] - q_s[t.a]
        return float(delta * delta)
    return loss


def run_gradcheck(trials: int = 100, seed: int = 0, eps: float = 1e-5,
                  tolerance: float = DEFAULT_TOLERANCE) -> GradcheckReport:
    """Compare every gradient rule with central differences on random instances.

    Args:
        trials (int): Random instances per check
        seed (int): Seed of the instance generator
        eps (float): Finite-difference step
        tolerance (float): Relative error bound for ``passed``
    """
    rng = np.random.default_rng(seed)
    report = GradcheckReport(tolerance, DECOMPOSITION_TOLERANCE)
    names = ("full_gradient", "full_gradient_terminal", "semi_gradient_terminal",
             "averaged_n1", "averaged_n5", "fgdqn_gradient", "decomposition")
    for name in names:
        report.checks[name] = CheckResult(name)

    for trial in range(trials):
        obs_dim, num_actions, feature_dim, layout = random_problem(rng)
        params = net_init(layout, int(rng.integers(2 ** 31)))
        net = XiNet(params, num_actions, feature_dim)
        t = random_transition(rng, obs_dim, num_actions, feature_dim)
        a_hat = int(rng.integers(num_actions))

        full = full_gradient(net, t, a_hat, GAMMA)
        numeric = finite_diff_grad(_residual_loss(t, a_hat, GAMMA, num_actions, feature_dim), params, eps)
        report.checks["full_gradient"].add(relative_error(full.grad, numeric))

        numeric0 = finite_diff_grad(_residual_loss(t, a_hat, 0.0, num_actions, feature_dim), params, eps)
        report.checks["full_gradient_terminal"].add(relative_error(full_gradient(net, t, a_hat, 0.0).grad, numeric0))
        report.checks["semi_gradient_terminal"].add(relative_error(semi_gradient(net, t, a_hat, 0.0).grad, numeric0))

        # full - semi must be exactly the bootstrap term
        semi = semi_gradient(net, t, a_hat, GAMMA)
        delta = bellman_residual(net, t, a_hat, GAMMA).delta
        cot = np.zeros((num_actions, feature_dim))
        cot[a_hat] = 2.0 * GAMMA * delta
        bootstrap = net_backward(params, t.s_next, cot.reshape(-1))
        report.checks["decomposition"].add(
            float(np.max(np.abs(full.grad.values - (semi.grad.values + bootstrap.values))))
        )

        for n, name in ((1, "averaged_n1"), (5, "averaged_n5")):
            batch = [random_transition(rng, obs_dim, num_actions, feature_dim, s=t.s, a=t.a,
                                       terminal=bool(rng.random() < 0.2)) for _ in range(n)]
            averaged = averaged_full_gradient(net, (t.s, t.a), batch, a_hat, GAMMA)
            numeric_avg = finite_diff_grad(_averaged_loss(batch, a_hat, GAMMA, num_actions, feature_dim),
                                           params, eps)
            report.checks[name].add(relative_error(averaged.grad, numeric_avg))

        q_params = net_init((obs_dim, *layout[1:-1], num_actions), int(rng.integers(2 ** 31)))
        qnet = QNet(q_params, num_actions)
        a_star = int(np.argmax(net_forward(q_params, t.s_next)))
        numeric_q = finite_diff_grad(_fgdqn_loss(t, GAMMA, a_star), q_params, eps)
        report.checks["fgdqn_gradient"].add(relative_error(fgdqn_gradient(qnet, t, GAMMA).grad, numeric_q))

        if (trial + 1) % 25 == 0:
            logger.debug("gradcheck: %d/%d trials, worst so far %.3e", trial + 1, trials,
                         report.max_relative_error)

    logger.info("gradcheck: max relative error %.3e over %d trials", report.max_relative_error, trials)
    return report
