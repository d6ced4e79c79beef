import numpy as np
import pytest

from fgsfrql.errors import UsageError
from fgsfrql.gradcheck import random_problem, run_gradcheck
from fgsfrql.models.tasks import TaskSpec, Transition
from fgsfrql.network import ParamVector, net_backward, net_init
from fgsfrql.successor import QNet, XiNet, new_library, spawn_task, xi_eval
from fgsfrql.updates import (
    averaged_full_gradient,
    batch_full_gradient,
    batch_msbe,
    bellman_residual,
    dqn_gradient,
    fgdqn_gradient,
    full_gradient,
    joint_update,
    mean_target_state,
    q_batch_gradient,
    semi_gradient,
)
from tests.helpers import make_transition, random_xi_net

GAMMA = 0.95


def test_bellman_residual_definition(rng):
    net = random_xi_net(rng)
    t = make_transition(rng)
    delta = bellman_residual(net, t, 1, GAMMA).delta
    expected = t.features + GAMMA * xi_eval(net, t.s_next)[1] - xi_eval(net, t.s)[t.a]
    assert np.allclose(delta, expected)


def test_report_statistics(rng):
    net = random_xi_net(rng)
    t = make_transition(rng)
    report = full_gradient(net, t, 0, GAMMA)
    delta = bellman_residual(net, t, 0, GAMMA).delta
    assert report.batch_msbe == pytest.approx(delta @ delta)
    assert report.residual_norm == pytest.approx(np.linalg.norm(delta))
    assert report.mean_squared_residual == pytest.approx(report.batch_msbe)


def test_full_minus_semi_is_the_bootstrap_term():
    rng = np.random.default_rng(42)
    for _ in range(1000):
        obs_dim, num_actions, feature_dim, layout = random_problem(rng)
        net = XiNet(net_init(layout, int(rng.integers(2 ** 31))), num_actions, feature_dim)
        t = make_transition(rng, obs_dim, num_actions, feature_dim)
        a_hat = int(rng.integers(num_actions))
        delta = bellman_residual(net, t, a_hat, GAMMA).delta
        cot = np.zeros((num_actions, feature_dim))
        cot[a_hat] = 2.0 * GAMMA * delta
        bootstrap = net_backward(net.params, t.s_next, cot.reshape(-1))
        full = full_gradient(net, t, a_hat, GAMMA).grad.values
        semi = semi_gradient(net, t, a_hat, GAMMA).grad.values
        assert np.max(np.abs(full - (semi + bootstrap.values))) <= 1e-10


def test_terminal_full_equals_semi(rng):
    net = random_xi_net(rng)
    t = make_transition(rng, terminal=True)
    gamma_t = t.gamma_t(GAMMA)
    assert gamma_t == 0.0
    assert np.array_equal(full_gradient(net, t, 2, gamma_t).grad.values,
                          semi_gradient(net, t, 2, gamma_t).grad.values)


def test_gradcheck_passes():
    report = run_gradcheck(trials=100, seed=0)
    assert report.passed, report.text()
    assert report.max_relative_error <= 1e-6
    assert all(check.trials == 100 for check in report.checks.values())


def test_averaged_single_transition_is_bitwise_full_gradient(rng):
    for _ in range(20):
        net = random_xi_net(rng)
        t = make_transition(rng, terminal=bool(rng.random() < 0.3))
        a_hat = int(rng.integers(3))
        averaged = averaged_full_gradient(net, (t.s, t.a), [t], a_hat, GAMMA)
        full = full_gradient(net, t, a_hat, t.gamma_t(GAMMA))
        assert np.array_equal(averaged.grad.values, full.grad.values)
        assert averaged.batch_msbe == full.batch_msbe


def test_averaged_residual_uses_mean_target(rng):
    net = random_xi_net(rng)
    s, a = rng.normal(size=4), 1
    batch = [make_transition(rng, s=s, a=a, terminal=(k == 2)) for k in range(4)]
    report = averaged_full_gradient(net, (s, a), batch, 0, GAMMA)
    targets = [t.features + t.gamma_t(GAMMA) * xi_eval(net, t.s_next)[0] for t in batch]
    delta = np.mean(targets, axis=0) - xi_eval(net, s)[a]
    assert report.batch_msbe == pytest.approx(delta @ delta)
    per_sample = [float(np.sum((target - xi_eval(net, s)[a]) ** 2)) for target in targets]
    assert report.mean_squared_residual == pytest.approx(np.mean(per_sample))
    assert report.mean_squared_residual >= report.batch_msbe - 1e-12


def test_averaged_errors(rng):
    net = random_xi_net(rng)
    with pytest.raises(UsageError):
        averaged_full_gradient(net, (np.zeros(4), 0), [], 0, GAMMA)
    mixed = [make_transition(rng, key=b"a"), make_transition(rng, key=b"b")]
    with pytest.raises(UsageError):
        averaged_full_gradient(net, (mixed[0].s, mixed[0].a), mixed, 0, GAMMA)


def test_averaged_gradient_converges_to_the_expected_gradient():
    rng = np.random.default_rng(5)
    net = random_xi_net(rng)
    s, a, a_hat = rng.normal(size=4), 2, 1
    outcomes = [Transition(s=s, a=a, r=0.0, s_next=rng.normal(size=4), features=rng.uniform(size=2),
                           terminal=False, task_id=0, pivot_key=b"p") for _ in range(2)]
    expected = averaged_full_gradient(net, (s, a), outcomes, a_hat, GAMMA).grad.values

    def rms_error(n, repeats=200):
        errors = []
        for _ in range(repeats):
            batch = [outcomes[j] for j in rng.integers(2, size=n)]
            grad = averaged_full_gradient(net, (s, a), batch, a_hat, GAMMA).grad.values
            errors.append(np.sum((grad - expected) ** 2))
        return np.sqrt(np.mean(errors))

    small, large = rms_error(16), rms_error(256)
    assert large < small
    # 16x more samples: error shrinks by about sqrt(16)
    assert 2.5 < small / large < 6.5


def test_mean_target_state(rng):
    batch = [make_transition(rng) for _ in range(3)]
    assert np.allclose(mean_target_state(batch), np.mean([t.s_next for t in batch], axis=0))


def test_full_gradient_is_a_descent_direction():
    rng = np.random.default_rng(9)
    alpha0 = 0.1
    checked = 0
    for _ in range(60):
        obs_dim, num_actions, feature_dim, layout = random_problem(rng)
        net = XiNet(net_init(layout, int(rng.integers(2 ** 31))), num_actions, feature_dim)
        batch = [make_transition(rng, obs_dim, num_actions, feature_dim, terminal=bool(rng.random() < 0.2))
                 for _ in range(int(rng.integers(1, 9)))]
        a_hats = rng.integers(num_actions, size=len(batch))
        loss = batch_msbe(net, batch, a_hats, GAMMA)
        grad = batch_full_gradient(net, batch, a_hats, GAMMA).grad
        if grad.norm() < 1e-6:
            continue
        checked += 1
        decreased = False
        for step in (alpha0 / 2 ** k for k in range(11)):
            moved = XiNet(ParamVector(net.params.values - step * grad.values, layout), num_actions, feature_dim)
            if batch_msbe(moved, batch, a_hats, GAMMA) < loss:
                decreased = True
                break
        assert decreased
    assert checked >= 50


def test_batch_gradient_of_one_transition_matches_single(rng):
    net = random_xi_net(rng)
    t = make_transition(rng)
    batch = batch_full_gradient(net, [t], [1], GAMMA)
    assert np.allclose(batch.grad.values, full_gradient(net, t, 1, GAMMA).grad.values)


def test_scalar_q_rules(rng):
    qnet = QNet(net_init((4, 5, 3), seed=1), 3)
    t = make_transition(rng)
    fg = fgdqn_gradient(qnet, t, GAMMA)
    semi = dqn_gradient(qnet, t, GAMMA)
    assert fg.batch_msbe == semi.batch_msbe
    assert not np.allclose(fg.grad.values, semi.grad.values)

    terminal = make_transition(rng, terminal=True)
    assert np.array_equal(fgdqn_gradient(qnet, terminal, 0.0).grad.values,
                          dqn_gradient(qnet, terminal, 0.0).grad.values)


def test_q_batch_gradient_is_mean_of_singles(rng):
    qnet = QNet(net_init((4, 5, 3), seed=2), 3)
    batch = [make_transition(rng, terminal=(k == 1)) for k in range(3)]
    mean = sum(fgdqn_gradient(qnet, t, t.gamma_t(GAMMA)).grad.values for t in batch) / 3
    assert np.allclose(q_batch_gradient(qnet, batch, GAMMA, full=True).grad.values, mean)
    with pytest.raises(UsageError):
        q_batch_gradient(qnet, [], GAMMA, full=False)


def test_joint_update_touches_only_i_and_c(rng):
    lib = new_library(4, 3, 2, hidden=(5,), seed=0)
    for k in range(4):
        lib = spawn_task(lib, TaskSpec(k, [1.0, 0.0]), warm_start=False)
    t = make_transition(rng)
    grads = {k: full_gradient(lib.xi_nets[k], t, 0, GAMMA) for k in (1, 3)}
    updated = joint_update(lib, 3, 1, grads, 0.1)
    assert updated.xi_nets[0] is lib.xi_nets[0]
    assert updated.xi_nets[2] is lib.xi_nets[2]
    for k in (1, 3):
        assert np.allclose(updated.xi_nets[k].params.values,
                           lib.xi_nets[k].params.values - 0.1 * grads[k].grad.values)

    same = joint_update(lib, 2, 2, {2: full_gradient(lib.xi_nets[2], t, 0, GAMMA)}, 0.1)
    assert same.xi_nets[1] is lib.xi_nets[1]

    with pytest.raises(UsageError):
        joint_update(lib, 4, 0, grads, 0.1)
    with pytest.raises(UsageError):
        joint_update(lib, 3, 0, grads, 0.1)
