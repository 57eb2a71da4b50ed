import numpy as np
import pytest

from simplexdyn import aitchison as ag
from simplexdyn import replicator as rd
from simplexdyn.errors import StepTooLarge, WrongDimension

TELEMA = np.arange(1.0, 10.0).reshape(3, 3)


def rand_comp(rng, n):
    return ag.ilr_inv(rng.standard_normal(n - 1))


def test_rhs_rest_points_and_tangency():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 3))
    near_vertex = np.array([1 - 1e-6, 5e-7, 5e-7])
    assert np.max(np.abs(rd.replicator_rhs(a, near_vertex))) < 1e-5
    np.testing.assert_allclose(rd.replicator_rhs(-3 * np.eye(3), ag.barycenter(3)),
                               np.zeros(3), atol=1e-15)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        a = rng.standard_normal((n, n))
        p = rand_comp(rng, n)
        assert abs(rd.replicator_rhs(a, p).sum()) < 1e-14


def test_ilr_drift_zero_matrix_and_chain_rule():
    rng = np.random.default_rng(1)
    assert np.allclose(rd.ilr_drift(np.zeros((3, 3)), rng.standard_normal(2)), 0)
    t = 1e-6
    for _ in range(20):
        n = int(rng.integers(2, 6))
        a = rng.standard_normal((n, n))
        p = rand_comp(rng, n)
        rhs = rd.replicator_rhs(a, p)
        fd = (ag.ilr(ag.closure(p + t * rhs)) - ag.ilr(ag.closure(p - t * rhs))) / (2 * t)
        np.testing.assert_allclose(fd, rd.ilr_drift(a, ag.ilr(p)), atol=1e-6)


def test_ilr_drift_dirichlet_form():
    # For matrices with constant pair sums and interior equilibrium alpha/|alpha|,
    # the chart drift equals the cross-entropy gradient drift.
    rng = np.random.default_rng(2)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        alpha = rng.uniform(0.5, 2.0, n)
        tot = alpha.sum()
        u = alpha - alpha[0]
        v = rng.standard_normal(n)
        a = -tot * np.eye(n) + np.outer(u, np.ones(n)) + np.outer(np.ones(n), v)
        psi = ag.contrast_matrix(n)
        x = rng.standard_normal(n - 1)
        expect = psi @ (alpha - tot * ag.sfm(psi.T @ x))
        np.testing.assert_allclose(rd.ilr_drift(a, x), expect, atol=1e-12)


def test_integrate_constant_for_zero_matrix():
    p0 = ag.as_composition([0.5, 0.3, 0.2])
    traj = rd.integrate_replicator(np.zeros((3, 3)), p0,
                                   rd.OdeConfig(t_end=1.0, dt=0.01))
    assert np.max(np.abs(traj.states - p0)) < 1e-14


def test_integrate_reaches_interior_ess():
    traj = rd.integrate_replicator(TELEMA - 10 * np.eye(3), ag.barycenter(3),
                                   rd.OdeConfig(t_end=50.0, dt=0.01,
                                                record_every=100))
    np.testing.assert_allclose(traj.terminal, [1 / 30, 1 / 3, 19 / 30], atol=1e-6)


def test_integrate_reaches_vertex():
    traj = rd.integrate_replicator(TELEMA, ag.barycenter(3),
                                   rd.OdeConfig(t_end=50.0, dt=0.01,
                                                record_every=100))
    assert np.linalg.norm(traj.terminal - np.array([0.0, 0.0, 1.0])) < 1e-4


def test_integrate_conservation():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((4, 4)) * 2
    traj = rd.integrate_replicator(a, rand_comp(rng, 4),
                                   rd.OdeConfig(t_end=5.0, dt=0.01))
    sums = traj.states.sum(axis=1)
    assert np.max(np.abs(sums - 1)) < 1e-12
    assert np.min(traj.states) > 0


def test_step_too_large_guard():
    with pytest.raises(StepTooLarge):
        rd.integrate_replicator(1e9 * np.eye(3), ag.barycenter(3),
                                rd.OdeConfig(t_end=10.0, dt=10.0))


def test_phase_portrait():
    assert all(np.allclose(v, 0) for _, v in rd.phase_portrait(np.zeros((3, 3)), 6))
    for g in (4, 7, 12):
        assert len(rd.phase_portrait(TELEMA, g)) == (g - 1) * (g - 2) // 2
    p_e, v_e = min(rd.phase_portrait(TELEMA - 10 * np.eye(3), 6),
                   key=lambda pv: np.linalg.norm(pv[0] - ag.barycenter(3)))
    target = np.array([1 / 30, 1 / 3, 19 / 30])
    assert np.dot(v_e, target - p_e) > 0
    with pytest.raises(WrongDimension):
        rd.phase_portrait(np.eye(4), 5)


def test_rk4_order():
    a = TELEMA - 10 * np.eye(3)
    p0 = ag.as_composition([0.6, 0.3, 0.1])
    ref = rd.integrate_replicator(a, p0, rd.OdeConfig(t_end=1.0, dt=0.02 / 16,
                                                      record_every=10 ** 9))
    errs = []
    for dt in (0.02, 0.01):
        traj = rd.integrate_replicator(a, p0, rd.OdeConfig(t_end=1.0, dt=dt,
                                                           record_every=10 ** 9))
        errs.append(np.linalg.norm(ag.ilr(traj.terminal) - ag.ilr(ref.terminal)))
    order = np.log2(errs[0] / errs[1])
    assert 4 - np.log2(3) <= order <= 4 + np.log2(3)


def test_distance_nonexpansion_for_decomposable():
    # Valid metric statement: the log-ratio distance between two flows never
    # increases when the matrix has the shifted rank-one structure.
    rng = np.random.default_rng(4)
    for lam, a in ((0.0, TELEMA), (10.0, TELEMA - 10 * np.eye(3))):
        p0, q0 = rand_comp(rng, 3), rand_comp(rng, 3)
        cfg = rd.OdeConfig(t_end=2.0, dt=0.01)
        tp = rd.integrate_replicator(a, p0, cfg)
        tq = rd.integrate_replicator(a, q0, cfg)
        d = ag.dist(tp.states, tq.states)
        assert np.max(np.diff(d)) <= 1e-6 * 2.0


def test_energy_integral_bound_for_positive_lambda():
    # d(t)^2 + 2 lam int ||p-q||^2 ds <= d(0)^2, the valid integral form of
    # the contraction estimate.
    rng = np.random.default_rng(5)
    a, lam = TELEMA - 10 * np.eye(3), 10.0
    for _ in range(10):
        p0, q0 = rand_comp(rng, 3), rand_comp(rng, 3)
        cfg = rd.OdeConfig(t_end=2.0, dt=0.005)
        tp = rd.integrate_replicator(a, p0, cfg)
        tq = rd.integrate_replicator(a, q0, cfg)
        euc2 = ((tp.states - tq.states) ** 2).sum(axis=1)
        d = ag.dist(tp.states, tq.states)
        integral = np.trapezoid(euc2, tp.times)
        assert d[-1] ** 2 + 2 * lam * integral <= d[0] ** 2 * (1 + 1e-6)


def test_euclidean_exponential_claim_has_counterexamples():
    # The exponential form ||p(t)-q(t)|| <= e^(-lam t) d(p0,q0) fails: near
    # the barycenter the true decay rate of the Euclidean gap is lam/n, so
    # the claimed bound is violated once e^((n-1) lam t / n) outgrows the
    # initial distance ratio.  Kept as a pinned negative result; see the
    # project notes for the derivation.
    a, lam = -3.0 * np.eye(3), 3.0
    x = np.array([0.05, 0.0])
    p0, q0 = ag.ilr_inv(x), ag.ilr_inv(-x)
    cfg = rd.OdeConfig(t_end=2.0, dt=0.005, record_every=10)
    tp = rd.integrate_replicator(a, p0, cfg)
    tq = rd.integrate_replicator(a, q0, cfg)
    euc = np.sqrt(((tp.states - tq.states) ** 2).sum(axis=1))
    bound = np.exp(-lam * tp.times) * ag.dist(p0, q0)
    assert np.any(euc > bound * (1 + 10 * cfg.dt))
