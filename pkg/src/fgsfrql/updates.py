"""
Bellman residuals and the gradient rules built on them.

For a successor feature network xi and a transition (s, a, phi, s') with
bootstrap action a_hat the residual is

    delta = phi + gamma_t * xi(s', a_hat, .) - xi(s, a, .)

and the loss is ||delta||^2. The rules differ only in which terms are
differentiated:

- full_gradient: sum 2 delta (gamma_t grad xi(s', a_hat) - grad xi(s, a))
- semi_gradient: sum 2 delta (-grad xi(s, a)), bootstrap held constant
- averaged_full_gradient: residual against the mean target of N
  transitions sharing the pivot (s, a)

a_hat is always held fixed during differentiation. The scalar-Q rules used
by the DQN baselines follow the same conventions with Q in place of xi.
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from fgsfrql.errors import UsageError
from fgsfrql.models.tasks import Transition
from fgsfrql.network import NetGradient, net_backward, net_forward, sgd_step
from fgsfrql.successor import PolicyLibrary, QNet, XiNet, xi_eval
from fgsfrql.validators import validate_width

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualVec:
    """Bellman residual delta of width d_phi."""

    delta: np.ndarray


@dataclass(frozen=True)
class UpdateReport:
    """Gradient plus residual statistics of one update.

    Attributes:
        grad (NetGradient): Gradient of the loss w.r.t. the block's parameters
        residual_norm (float): sqrt(batch_msbe)
        batch_msbe (float): Squared Bellman error of the inputs under the
            current parameters (for averaged updates, of the averaged residual)
        mean_squared_residual (float): Mean over transitions of their own
            squared residual; equals batch_msbe for single transitions
    """

    grad: NetGradient
    residual_norm: float
    batch_msbe: float
    mean_squared_residual: float


def _cotangent(num_actions, feature_dim, actions, rows):
    """Place each row at its action in a zero [batch, |A| * d_phi] cotangent."""
    cot = np.zeros((len(actions), num_actions, feature_dim))
    cot[np.arange(len(actions)), actions] = rows
    return cot.reshape(len(actions), num_actions * feature_dim)


def _pivot_update(net: XiNet, s, a: int, transitions: Sequence[Transition],
                  a_hat: int, gammas: np.ndarray, full: bool) -> UpdateReport:
    """Residual and gradient of || mean_p(phi_p + gamma_p xi(s'_p, a_hat)) - xi(s, a) ||^2."""
    n = len(transitions)
    phis = np.stack([np.asarray(t.features, dtype=np.float64) for t in transitions])
    validate_width("features", phis, net.feature_dim)
    next_states = np.stack([np.asarray(t.s_next, dtype=np.float64) for t in transitions])

    xi_s = xi_eval(net, s)[a]
    xi_next = xi_eval(net, next_states)[:, a_hat, :]
    targets = phis + gammas[:, np.newaxis] * xi_next
    delta = targets.sum(axis=0) / n - xi_s

    grad = net_backward(net.params, s, _cotangent(net.num_actions, net.feature_dim, [a], [-2.0 * delta])[0])
    if full and np.any(gammas != 0.0):
        rows = (2.0 / n) * gammas[:, np.newaxis] * delta
        cot = _cotangent(net.num_actions, net.feature_dim, [a_hat] * n, rows)
        grad = grad + net_backward(net.params, next_states, cot)

    msbe = float(delta @ delta)
    per_sample = targets - xi_s
    return UpdateReport(
        grad=grad,
        residual_norm=float(np.sqrt(msbe)),
        batch_msbe=msbe,
        mean_squared_residual=float(np.mean(np.sum(per_sample * per_sample, axis=1))),
    )


def bellman_residual(net: XiNet, t: Transition, a_hat: int, gamma_t: float) -> ResidualVec:
    """delta = phi_t + gamma_t xi(s', a_hat, .) - xi(s, a, .).

    Raises:
        ShapeError: If observation or feature widths do not match the network
    """
    validate_width("features", t.features, net.feature_dim)
    delta = (np.asarray(t.features, dtype=np.float64)
             + gamma_t * xi_eval(net, t.s_next)[a_hat]
             - xi_eval(net, t.s)[t.a])
    return ResidualVec(delta)


def full_gradient(net: XiNet, t: Transition, a_hat: int, gamma_t: float) -> UpdateReport:
    """Exact gradient of ||delta||^2, bootstrap term included."""
    return _pivot_update(net, t.s, t.a, [t], a_hat, np.array([gamma_t], dtype=np.float64), full=True)


def semi_gradient(net: XiNet, t: Transition, a_hat: int, gamma_t: float) -> UpdateReport:
    """Gradient of ||delta||^2 with the bootstrap target treated as a constant."""
    return _pivot_update(net, t.s, t.a, [t], a_hat, np.array([gamma_t], dtype=np.float64), full=False)


def averaged_full_gradient(net: XiNet, pivot, batch: Sequence[Transition], a_hat: int,
                           gamma: float) -> UpdateReport:
    """Full gradient of the residual against the mean target of a pivot batch.

    Each transition contributes gamma, or 0 when it ended its episode.

    Args:
        net (XiNet): Block being differentiated
        pivot (tuple): (s, a) shared by every transition in the batch
        batch (list): N >= 1 transitions with the same pivot_key
        a_hat (int): Bootstrap action, fixed across the batch
        gamma (float): Discount

    Raises:
        UsageError: If the batch is empty or mixes pivot keys
    """
    if not batch:
        raise UsageError("Averaged update needs at least one transition")
    key = batch[0].pivot_key
    if any(t.pivot_key != key for t in batch[1:]):
        raise UsageError("Averaged update batch mixes pivot keys")
    s, a = pivot
    gammas = np.array([t.gamma_t(gamma) for t in batch], dtype=np.float64)
    return _pivot_update(net, s, int(a), batch, a_hat, gammas, full=True)


def mean_target_state(batch: Sequence[Transition]) -> np.ndarray:
    """Componentwise mean of the batch's next-state observations."""
    return np.mean(np.stack([np.asarray(t.s_next, dtype=np.float64) for t in batch]), axis=0)


# ===== MINIBATCHES =====

def _batch_residuals(net: XiNet, transitions, a_hats, gamma):
    states = np.stack([t.s for t in transitions]).astype(np.float64)
    next_states = np.stack([t.s_next for t in transitions]).astype(np.float64)
    actions = np.array([t.a for t in transitions])
    a_hats = np.asarray(a_hats, dtype=int)
    phis = np.stack([t.features for t in transitions]).astype(np.float64)
    gammas = np.array([t.gamma_t(gamma) for t in transitions], dtype=np.float64)
    rows = np.arange(len(transitions))
    xi_s = xi_eval(net, states)[rows, actions]
    xi_next = xi_eval(net, next_states)[rows, a_hats]
    delta = phis + gammas[:, np.newaxis] * xi_next - xi_s
    return states, next_states, actions, a_hats, gammas, delta


def batch_msbe(net: XiNet, transitions: Sequence[Transition], a_hats, gamma: float) -> float:
    """Mean over transitions of ||delta||^2 with fixed bootstrap actions."""
    *_, delta = _batch_residuals(net, transitions, a_hats, gamma)
    return float(np.mean(np.sum(delta * delta, axis=1)))


def _batch_gradient(net, transitions, a_hats, gamma, full):
    if not transitions:
        raise UsageError("Minibatch update needs at least one transition")
    states, next_states, actions, a_hats, gammas, delta = _batch_residuals(net, transitions, a_hats, gamma)
    n = len(transitions)
    grad = net_backward(net.params, states,
                        _cotangent(net.num_actions, net.feature_dim, actions, (-2.0 / n) * delta))
    if full and np.any(gammas != 0.0):
        rows = (2.0 / n) * gammas[:, np.newaxis] * delta
        grad = grad + net_backward(net.params, next_states,
                                   _cotangent(net.num_actions, net.feature_dim, a_hats, rows))
    msbe = float(np.mean(np.sum(delta * delta, axis=1)))
    return UpdateReport(grad, float(np.sqrt(msbe)), msbe, msbe)


def batch_full_gradient(net: XiNet, transitions: Sequence[Transition], a_hats, gamma: float) -> UpdateReport:
    """Exact gradient of :func:`batch_msbe` (mean of single-sample full gradients)."""
    return _batch_gradient(net, transitions, a_hats, gamma, full=True)


def batch_semi_gradient(net: XiNet, transitions: Sequence[Transition], a_hats, gamma: float) -> UpdateReport:
    """Mean of single-sample semi-gradients."""
    return _batch_gradient(net, transitions, a_hats, gamma, full=False)


# ===== SCALAR Q =====

def _q_update(net: QNet, transitions, gammas, full):
    states = np.stack([t.s for t in transitions]).astype(np.float64)
    next_states = np.stack([t.s_next for t in transitions]).astype(np.float64)
    actions = np.array([t.a for t in transitions])
    rewards = np.array([t.r for t in transitions], dtype=np.float64)
    rows = np.arange(len(transitions))
    n = len(transitions)

    q_next = np.atleast_2d(net_forward(net.params, next_states))
    best = np.argmax(q_next, axis=1)
    q_s = np.atleast_2d(net_forward(net.params, states))
    delta = rewards + gammas * q_next[rows, best] - q_s[rows, actions]

    cot = np.zeros((n, net.num_actions))
    cot[rows, actions] = (-2.0 / n) * delta
    grad = net_backward(net.params, states, cot)
    if full and np.any(gammas != 0.0):
        cot_next = np.zeros((n, net.num_actions))
        cot_next[rows, best] = (2.0 / n) * gammas * delta
        grad = grad + net_backward(net.params, next_states, cot_next)
    msbe = float(np.mean(delta * delta))
    return UpdateReport(grad, float(np.sqrt(msbe)), msbe, msbe)


def q_batch_gradient(net: QNet, transitions: Sequence[Transition], gamma: float, full: bool) -> UpdateReport:
    """Mean scalar-Q gradient over a minibatch.

    delta = r + gamma_t max_a' Q(s', a') - Q(s, a), with a* = argmax held
    fixed. ``full=False`` gives the DQN rule -2 delta grad Q(s, a);
    ``full=True`` adds 2 delta gamma_t grad Q(s', a*).

    Raises:
        UsageError: If the batch is empty
    """
    if not transitions:
        raise UsageError("Minibatch update needs at least one transition")
    gammas = np.array([t.gamma_t(gamma) for t in transitions], dtype=np.float64)
    return _q_update(net, transitions, gammas, full)


def dqn_gradient(net: QNet, t: Transition, gamma_t: float) -> UpdateReport:
    """Semi-gradient scalar-Q rule on one transition."""
    return _q_update(net, [t], np.array([gamma_t], dtype=np.float64), full=False)


def fgdqn_gradient(net: QNet, t: Transition, gamma_t: float) -> UpdateReport:
    """Full-gradient scalar-Q rule on one transition."""
    return _q_update(net, [t], np.array([gamma_t], dtype=np.float64), full=True)


# ===== JOINT BLOCK UPDATE =====

def joint_update(lib: PolicyLibrary, i: int, c: int, grads: Mapping[int, UpdateReport],
                 alpha: float) -> PolicyLibrary:
    """Step block i, and block c when c != i; every other block is left as is.

    Raises:
        UsageError: If i or c is outside the library or a needed gradient is missing
    """
    for name, index in (("i", i), ("c", c)):
        if not 0 <= index < lib.active_count:
            raise UsageError(f"Block {name}={index} outside library of {lib.active_count}")
    for index in {i, c}:
        if index not in grads:
            raise UsageError(f"No gradient supplied for block {index}")
    for index in sorted({i, c}):
        net = lib.xi_nets[index]
        params = sgd_step(net.params, grads[index].grad, alpha)
        lib = lib.with_block(index, XiNet(params, net.num_actions, net.feature_dim))
    return lib
