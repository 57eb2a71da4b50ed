import numpy as np
import pytest
from scipy import stats as sps

from simplexdyn import aitchison as ag
from simplexdyn import sde
from simplexdyn import verify as vf
from simplexdyn.errors import (
    NonpositiveTime,
    StepVsCorrelation,
    WalkTooShort,
)

TELEMA = np.arange(1.0, 10.0).reshape(3, 3)
E3 = ag.barycenter(3)


# ---------------------------------------------------------------------------
# exact Brownian motion


def test_bm_exact_time_zero_and_determinism():
    np.testing.assert_array_equal(sde.bm_exact(E3, 0.0, 1.0, 5), E3)
    a = sde.bm_exact(E3, 2.0, 1.0, 5)
    b = sde.bm_exact(E3, 2.0, 1.0, 5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, sde.bm_exact(E3, 2.0, 1.0, 6))


def test_bm_exact_law_moments():
    t, sigma, n_paths = 0.7, 1.3, 100_000
    ens = sde.bm_terminal_ensemble([0.5, 0.3, 0.2], t, sigma, 11, n_paths)
    x = ag.ilr(ens.terminal_states) - ag.ilr(ag.as_composition([0.5, 0.3, 0.2]))
    se_mean = sigma * np.sqrt(t) / np.sqrt(n_paths)
    assert np.max(np.abs(x.mean(axis=0))) < 3 * se_mean
    cov = np.cov(x.T)
    se_cov = sigma ** 2 * t * np.sqrt(2.0 / n_paths)
    assert np.max(np.abs(cov - sigma ** 2 * t * np.eye(2))) < 3 * se_cov


def test_bm_path_increment_checks():
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=0.05, master_seed=21)
    marks = [0, 5, 10, 15, 20]
    snaps = sde.em_chart_snapshots(sde.NoDrift(), sde.fixed_start(E3), cfg,
                                   4000, marks)
    inc1 = snaps[1] - snaps[0]
    inc2 = snaps[2] - snaps[1]
    corr = np.corrcoef(np.hstack([inc1, inc2]).T)[:2, 2:]
    assert np.max(np.abs(corr)) < 3.0 / np.sqrt(4000)
    rep = vf.energy_test("gap-law", inc1, snaps[4] - snaps[3], seed=1,
                         max_each=800)
    assert rep.passed


def test_bm_path_jump_bound():
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=0.01, master_seed=22)
    worst = 0.0
    for i in range(100):
        traj = sde.bm_path(E3, cfg, trajectory_index=i)
        jumps = np.diff(traj.ilr_states(), axis=0)
        worst = max(worst, float(np.max(np.abs(jumps))))
    bound = 6.0 * 1.0 * np.sqrt(cfg.dt) * np.sqrt(2.0 * np.log(cfg.steps))
    assert worst < bound


# ---------------------------------------------------------------------------
# heat kernel


def test_heat_kernel_at_coincident_points():
    assert sde.heat_kernel_density(E3, E3, 0.5) == pytest.approx(
        (2 * np.pi * 0.5) ** -1.0, rel=1e-12)
    with pytest.raises(NonpositiveTime):
        sde.heat_kernel_density(E3, E3, 0.0)


def test_heat_kernel_normalization_mc():
    # Integrate the kernel against the invariant measure via the chart with a
    # wider Gaussian proposal.
    rng = np.random.default_rng(30)
    t, n_samples = 0.4, 100_000
    p = ag.as_composition([0.5, 0.4, 0.1])
    x0 = ag.ilr(p)
    prop_sd = np.sqrt(2.0 * t)
    y = x0 + prop_sd * rng.standard_normal((n_samples, 2))
    log_kernel = (-np.log(2 * np.pi * t)
                  - ((y - x0) ** 2).sum(axis=1) / (2 * t))
    log_prop = (-np.log(2 * np.pi * prop_sd ** 2)
                - ((y - x0) ** 2).sum(axis=1) / (2 * prop_sd ** 2))
    w = np.exp(log_kernel - log_prop)
    est, se = w.mean(), w.std(ddof=1) / np.sqrt(n_samples)
    assert abs(est - 1.0) <= 3 * se


def test_heat_kernel_varadhan_convergence():
    rng = np.random.default_rng(31)
    p = ag.ilr_inv(rng.standard_normal(2))
    q = ag.ilr_inv(rng.standard_normal(2) + 1.0)
    d2 = ag.dist(p, q) ** 2
    errs = [abs(t * sde.heat_kernel_log_density(p, q, t) + d2 / 2)
            for t in (1e-1, 1e-2, 1e-3)]
    assert errs[0] > errs[1] > errs[2]
    # error is exactly (n-1)/2 * t ln(2 pi t)
    for t, err in zip((1e-1, 1e-2, 1e-3), errs):
        assert err == pytest.approx(abs(t * np.log(2 * np.pi * t)), rel=1e-9)


# ---------------------------------------------------------------------------
# Euler-Maruyama paths and ensembles


def test_sde_path_matches_exact_law():
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=0.02, master_seed=40)
    term = np.array([sde.sde_path(sde.NoDrift(), E3, cfg, i).terminal
                     for i in range(2000)])
    x = ag.ilr(term)
    crit = vf.ks_critical(2000, 0.01)
    for j in range(2):
        assert vf.ks_statistic(x[:, j], sps.norm.cdf) < crit


def test_drift_equivalence_replicator_vs_langevin():
    rng = np.random.default_rng(41)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        alpha = rng.uniform(0.5, 2.5, n)
        tot = alpha.sum()
        psi = ag.contrast_matrix(n)
        # u with the same chart projection as alpha
        u = alpha + rng.standard_normal() * np.ones(n)
        v = rng.standard_normal(n)
        a = -tot * np.eye(n) + np.outer(u, np.ones(n)) + np.outer(np.ones(n), v)
        x = rng.standard_normal(n - 1)
        d1 = sde.ReplicatorDrift(a).chart_drift(x)
        d2 = sde.DirichletLangevinDrift(alpha).chart_drift(x)
        np.testing.assert_allclose(d1, d2, atol=1e-12)


def test_dirichlet_invariance_small():
    alpha = np.ones(3)
    cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=1.0, dt=2e-3, master_seed=42)
    ens = sde.em_terminal_ensemble(sde.ReplicatorDrift(-3 * np.eye(3)),
                                   sde.dirichlet_start(alpha), cfg, 20_000)
    rep = vf.dirichlet_moment_check(ens.terminal_states, alpha)
    assert rep.passed, rep.to_dict()


def test_langevin_dirichlet_invariance_small():
    alpha = np.array([2.0, 1.0, 1.5])
    cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=1.0, dt=2e-3, master_seed=43)
    ens = sde.em_terminal_ensemble(sde.DirichletLangevinDrift(alpha),
                                   sde.dirichlet_start(alpha), cfg, 20_000)
    rep = vf.dirichlet_moment_check(ens.terminal_states, alpha)
    assert rep.passed, rep.to_dict()


def test_em_weak_order_one():
    alpha = np.ones(3)
    drift = sde.ReplicatorDrift(-3 * np.eye(3))
    biases = []
    for dt in (0.2, 0.1):
        cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=1.0, dt=dt, master_seed=314)
        ens = sde.em_terminal_ensemble(drift, sde.dirichlet_start(alpha), cfg,
                                       200_000)
        biases.append(abs(((ens.terminal_states ** 2).mean(axis=0) - 1 / 6).mean()))
    ratio = biases[1] / biases[0]
    assert 0.25 <= ratio <= 0.75


def test_ensemble_bit_identical_across_chunking():
    cfg = sde.SdeConfig(sigma=1.0, t_end=0.5, dt=0.01, master_seed=44)
    drift = sde.ReplicatorDrift(TELEMA)
    a = sde.em_terminal_ensemble(drift, sde.fixed_start(E3), cfg, 300, chunk=32)
    b = sde.em_terminal_ensemble(drift, sde.fixed_start(E3), cfg, 300, chunk=999)
    np.testing.assert_array_equal(a.terminal_states, b.terminal_states)


# ---------------------------------------------------------------------------
# synchronous coupling


def test_coupled_nodrift_distance_constant():
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=0.01, master_seed=50)
    p0 = ag.as_composition([0.6, 0.3, 0.1])
    ta, tb = sde.coupled_pair(sde.NoDrift(), p0, E3, cfg)
    d = ag.dist(ta.states, tb.states)
    assert np.max(np.abs(d - d[0])) < 1e-12


def test_coupled_contraction_positive_lambda():
    cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=1.0, dt=1e-3, master_seed=51)
    drift = sde.ReplicatorDrift(TELEMA - 10 * np.eye(3))
    pair = sde.coupled_pair(drift, [0.6, 0.3, 0.1], [0.1, 0.2, 0.7], cfg)
    rep = vf.contraction_report(pair, 10.0)
    assert rep.monotone.passed
    assert rep.integral_bound.passed


def test_coupled_expansion_witness_for_nondecomposable():
    cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=1.0, dt=0.01, master_seed=52)
    witness = vf.expansion_witness_search(
        sde.ReplicatorDrift(np.diag([1.0, -0.5])), cfg, 2, range(10),
        start_scale=2.0)
    assert witness is not None


def test_coupled_no_witness_for_boundary_diag():
    # diag(1, -1) has constant drift in the chart: the coupled distance is
    # exactly constant, so no expansion witness can exist at any seed.
    cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=1.0, dt=0.01, master_seed=53)
    witness = vf.expansion_witness_search(
        sde.ReplicatorDrift(np.diag([1.0, -1.0])), cfg, 2, range(20),
        start_scale=2.0)
    assert witness is None


# ---------------------------------------------------------------------------
# colored-noise fitness


def test_ou_moments():
    cfg = sde.SdeConfig(sigma=1.0, t_end=100.0, dt=0.1, master_seed=60)
    y = sde.ou_fitness_path(0.8, 3, cfg, seed=60)
    n_samp = y.size
    assert abs((y ** 2).mean() - 1.0) < 3 * np.sqrt(2.0 / n_samp) * 3  # AR(1) ESS
    lag = 5
    rho_expect = np.exp(-lag * cfg.dt / 0.8 ** 2)
    rho_hat = np.mean(y[:-lag] * y[lag:])
    assert abs(rho_hat - rho_expect) < 0.05
    cross = np.mean(y[:, 0] * y[:, 1])
    assert abs(cross) < 0.05


def test_ou_is_stationary_in_law():
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=0.01, master_seed=61)
    first = np.array([sde.ou_fitness_path(0.5, 2, cfg, seed=s)[0]
                      for s in range(4000)])
    last = np.array([sde.ou_fitness_path(0.5, 2, cfg, seed=s)[-1]
                     for s in range(4000)])
    assert abs(first.var() - 1.0) < 0.07
    assert abs(last.var() - 1.0) < 0.07


def test_wong_zakai_frozen_fitness_closed_form():
    # With a constant fitness vector the flow has the explicit solution
    # p(t) = p0 (+) sfm(t y / lambda), which Simpson integration hits exactly.
    lam = 0.5
    y = np.array([0.3, -0.8, 0.5])
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=0.02, master_seed=62)
    psi = ag.contrast_matrix(3)
    x = ag.ilr(E3)
    f = (psi @ y) / lam
    for k in range(cfg.steps):
        x = x + (cfg.dt / 6.0) * (f + 4.0 * f + f)
    expect = ag.perturb(E3, ag.sfm(cfg.t_end * y / lam))
    np.testing.assert_allclose(ag.ilr_inv(x), expect, atol=1e-12)


def test_wong_zakai_guard_and_validity():
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=0.05, master_seed=63)
    with pytest.raises(StepVsCorrelation):
        sde.wong_zakai_path(0.1, E3, cfg)
    cfg2 = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=1e-3, master_seed=63)
    traj = sde.wong_zakai_path(0.4, E3, cfg2)
    assert np.min(traj.states) > 0
    assert np.max(np.abs(traj.states.sum(axis=1) - 1)) < 1e-12


def test_wz_ensemble_matches_single_paths():
    cfg = sde.SdeConfig(sigma=1.0, t_end=0.5, dt=5e-3, master_seed=64)
    ens = sde.wz_terminal_ensemble(0.4, E3, cfg, 8)
    for i in range(8):
        traj = sde.wong_zakai_path(0.4, E3, cfg, trajectory_index=i)
        np.testing.assert_allclose(ens.terminal_states[i], traj.terminal,
                                   atol=1e-12)


# ---------------------------------------------------------------------------
# random walks and rescaling


def test_walk_zero_steps():
    walk = sde.simplex_random_walk(E3, 0, 1)
    assert walk.shape == (1, 3)
    np.testing.assert_array_equal(walk[0], E3)


def test_walk_step_moments():
    rng = np.random.default_rng(70)
    xi = sde.rademacher_steps(rng, 100_000, 2)
    f = ag.ilr_inv(xi)
    c = ag.clr(f)
    assert np.max(np.abs(c.mean(axis=0))) < 3 * c.std(axis=0).max() / np.sqrt(1e5)
    cov = np.cov(ag.ilr(f).T)
    assert np.max(np.abs(cov - np.eye(2))) < 3 * np.sqrt(2 / 1e5) * 2


def test_walk_is_chart_cumsum():
    walk = sde.simplex_random_walk([0.5, 0.2, 0.3], 50, 7)
    x = ag.ilr(walk)
    inc = np.diff(x, axis=0)
    np.testing.assert_allclose(np.abs(inc), 1.0, atol=1e-12)
    np.testing.assert_allclose(x[0], ag.ilr(ag.as_composition([0.5, 0.2, 0.3])),
                               atol=1e-14)


def test_walk_rejects_bad_sampler():
    def biased(rng, size):
        return ag.ilr_inv(rng.standard_normal((size, 2)) + 0.5)

    with pytest.raises(ValueError):
        sde.simplex_random_walk(E3, 10, 3, step_sampler=biased)


def test_walk_accepts_good_sampler():
    def gaussian(rng, size):
        return ag.ilr_inv(rng.standard_normal((size, 2)))

    walk = sde.simplex_random_walk(E3, 25, 3, step_sampler=gaussian)
    assert walk.shape == (26, 3)


def test_donsker_rescaled_basics():
    walk = sde.simplex_random_walk(E3, 64, 8)
    traj = sde.donsker_rescaled(walk, 64, [0.0, 0.25, 0.5, 1.0])
    np.testing.assert_allclose(traj.states[0], E3, atol=1e-14)
    # at integer rescaled times the value is the walk state scaled by 1/sqrt(n)
    np.testing.assert_allclose(ag.ilr(traj.states[-1]),
                               ag.ilr(walk[64]) / 8.0, atol=1e-12)
    with pytest.raises(WalkTooShort):
        sde.donsker_rescaled(walk, 64, [1.5])


def test_donsker_interpolation_is_chart_linear():
    walk = sde.simplex_random_walk(E3, 10, 9)
    traj = sde.donsker_rescaled(walk, 10, [0.25])
    x = ag.ilr(walk)
    expect = (x[2] + 0.5 * (x[3] - x[2])) / np.sqrt(10)
    np.testing.assert_allclose(ag.ilr(traj.states[0]), expect, atol=1e-12)


def test_donsker_clt():
    rng_terminal = []
    n_steps, n_walks = 64, 2000
    for w in range(n_walks):
        walk = sde.simplex_random_walk(E3, n_steps, (100, w))
        traj = sde.donsker_rescaled(walk, n_steps, [1.0])
        rng_terminal.append(ag.ilr(traj.states[0]))
    x = np.asarray(rng_terminal)
    # 64 lattice steps leave a discreteness gap of about phi(0)/sqrt(64)/2;
    # allow that plus sampling noise at 2000 walks.
    for j in range(2):
        assert vf.ks_statistic(x[:, j], sps.norm.cdf) < 0.08


# ---------------------------------------------------------------------------
# corrector identity


def test_ito_corrector_formula():
    rng = np.random.default_rng(80)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        p = ag.ilr_inv(rng.standard_normal(n - 1))
        b = ag.ito_corrector(p)
        np.testing.assert_allclose(b, -ag.shahshahani_inv(p) @ p, atol=1e-14)
