"""Named verification suites.

Each suite stresses one theorem-level claim at desk scale and returns a
serializable report with one gate per sub-check.  The command-line ``verify``
subcommand and the acceptance tests both run these functions, so the gates
are defined exactly once.

Reference matrices used throughout:

* ``TELEMA``          - the 1..9 matrix, decomposable with lam = 0, whose
  unique equilibrium and stable strategy is the third vertex.
* ``TELEMA - 10 id``  - lam = 10, interior equilibrium (1/30, 1/3, 19/30).
* ``diag(1, -1)``     - two-type boundary case: decomposable with lam = 0,
  so synchronously coupled pairs keep their log-ratio distance constant.
* ``diag(1, -1/2)``   - two-type matrix outside the decomposable class; its
  coupled pairs demonstrably expand.
"""

import numpy as np
from scipy import stats as sps

from . import aitchison as ag
from . import jko as jk
from . import payoff as po
from . import sde
from . import verify as vf
from .grids import interior_grid
from .replicator import ilr_drift
from .rng import make_rng

TELEMA = np.arange(1.0, 10.0).reshape(3, 3)
RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
DIAG_PM1 = np.diag([1.0, -1.0])
DIAG_EXPANDING = np.diag([1.0, -0.5])

SUITE_NAMES = ("geometry", "dirichlet", "contraction", "donsker",
               "wongzakai", "transience", "jko")


def _report(name: str, seed, gates: list[vf.TestReport]) -> dict:
    return {"suite": name, "seed": seed,
            "gates": [g.to_dict() for g in gates],
            "pass": all(g.passed for g in gates)}


# ---------------------------------------------------------------------------
# geometry


def geometry_suite(seed: int = 20240, cases: int = 1000) -> dict:
    """Identity checks of the log-ratio calculus at 1e-12 over n in 2..8."""
    rng = make_rng(seed)
    tol = 1e-12
    worst_trafo = worst_iso = worst_round = worst_domination = 0.0
    worst_shah = 0.0
    per_n = max(cases // 7, 1)
    for n in range(2, 9):
        x = rng.standard_normal((per_n, n - 1)) * 1.5
        y = rng.standard_normal((per_n, n - 1)) * 1.5
        alpha = rng.standard_normal(per_n)
        p, q = ag.ilr_inv(x), ag.ilr_inv(y)
        lhs = ag.clr(ag.perturb(ag.power(alpha, p), q))
        rhs = alpha[:, None] * ag.clr(p) + ag.clr(q)
        worst_trafo = max(worst_trafo, float(np.max(np.abs(lhs - rhs))))
        inner = ag.inner(p, q)
        clr_dot = np.sum(ag.clr(p) * ag.clr(q), axis=-1)
        ilr_dot = np.sum(ag.ilr(p) * ag.ilr(q), axis=-1)
        worst_iso = max(worst_iso,
                        float(np.max(np.abs(inner - clr_dot))),
                        float(np.max(np.abs(inner - ilr_dot))))
        worst_round = max(worst_round,
                          float(np.max(np.abs(ag.ilr_inv(ag.ilr(p)) - p))),
                          float(np.max(np.abs(ag.ilr(ag.ilr_inv(x)) - x))))
        d = ag.dist(p, q)
        euc = np.sqrt(np.sum((p - q) ** 2, axis=-1))
        worst_domination = max(worst_domination, float(np.max(euc - d)))
        worst_shah = max(worst_shah, float(np.max(np.abs(
            ag.shahshahani_inv(p) - ag.sfm_jacobian(ag.clr(p))))))
    worst_contrast = 0.0
    for n in range(2, 9):
        psi = ag.contrast_matrix(n)
        worst_contrast = max(
            worst_contrast,
            float(np.max(np.abs(psi @ psi.T - np.eye(n - 1)))),
            float(np.max(np.abs(psi.T @ psi - np.eye(n) + np.ones((n, n)) / n))))
    gates = [
        vf.gate("transformation-rule", worst_trafo, tol, "<=", seed),
        vf.gate("inner-product-isometry", worst_iso, tol, "<=", seed),
        vf.gate("chart-round-trip", worst_round, tol, "<=", seed),
        vf.gate("contrast-identities", worst_contrast, tol, "<=", seed),
        vf.gate("distance-dominates-euclidean", worst_domination, tol, "<=", seed),
        vf.gate("metric-tensor-vs-jacobian", worst_shah, tol, "<=", seed),
    ]
    return _report("geometry", seed, gates)


# ---------------------------------------------------------------------------
# worked-example reproduction (exact values)


def paper_examples_suite() -> dict:
    """Exact reproduction of the worked matrix examples."""
    gates = []
    d = po.decompose(TELEMA)
    ok = (d is not None and d.lam == 0.0
          and np.array_equal(d.u, np.array([0.0, 3.0, 6.0]))
          and np.array_equal(d.v, np.array([1.0, 2.0, 3.0])))
    gates.append(vf.gate("telema-decomposition", 0.0 if ok else 1.0, 0.0, "<="))
    vertex = np.array([0.0, 0.0, 1.0])
    ess = po.is_ess(TELEMA, vertex)
    gates.append(vf.gate("telema-vertex-ess",
                         0.0 if ess is po.EssStatus.CERTIFIED else 1.0, 0.0, "<="))
    d10 = po.decompose(TELEMA - 10.0 * np.eye(3))
    star = po.interior_ne_decomposed(d10)
    target = np.array([1.0 / 30.0, 1.0 / 3.0, 19.0 / 30.0])
    err = float(np.max(np.abs(star - target)))
    gates.append(vf.gate("shift10-interior-ne", err, 1e-12, "<="))
    rep5 = po.enumerate_nash(TELEMA - 5.0 * np.eye(3))
    t5 = np.array([0.0, 0.2, 0.8])
    err5 = min((float(np.max(np.abs(p - t5))) for p in rep5.all_equilibria),
               default=np.inf)
    gates.append(vf.gate("shift5-boundary-ne", err5, 1e-9, "<="))
    return _report("paper-examples", None, gates)


# ---------------------------------------------------------------------------
# dirichlet invariance


def dirichlet_suite(seed: int = 1902, n_paths: int = 100_000, t_end: float = 1.0,
                    dt: float = 1e-3, mixing_t: float = 5.0,
                    grid_points: int = 1000) -> dict:
    """Invariance of Dirichlet(1,1,1) for the noisy flow of -3 id.

    Pointwise residual on a grid, then Monte Carlo moment gates from the
    stationary start and from a deterministic start (mixing).
    """
    a = -3.0 * np.eye(3)
    alpha = np.ones(3)
    grid = interior_grid(3, grid_points)
    res = np.abs(vf.dircond_residual(a, alpha, grid))
    gates = [vf.gate("stationarity-residual-on-grid", float(res.max()),
                     1e-12, "<=", seed, (grid.shape[0],))]
    drift = sde.ReplicatorDrift(a)
    cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=t_end, dt=dt, master_seed=seed)
    ens = sde.em_terminal_ensemble(drift, sde.dirichlet_start(alpha), cfg, n_paths)
    rep = vf.dirichlet_moment_check(ens.terminal_states, alpha,
                                    "moments-from-dirichlet-start", seed)
    gates.append(rep)
    cfg2 = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=mixing_t, dt=dt,
                         master_seed=seed + 1)
    ens2 = sde.em_terminal_ensemble(drift, sde.fixed_start([0.7, 0.2, 0.1]),
                                    cfg2, n_paths)
    rep2 = vf.dirichlet_moment_check(ens2.terminal_states, alpha,
                                     "moments-from-point-start", seed + 1)
    gates.append(rep2)
    return _report("dirichlet", seed, gates)


# ---------------------------------------------------------------------------
# Brownian-motion law


def _varadhan_pairs(rng, n: int, count: int, min_dist: float = 0.5):
    pairs = []
    while len(pairs) < count:
        p = ag.ilr_inv(rng.standard_normal(n - 1))
        q = ag.ilr_inv(rng.standard_normal(n - 1))
        if ag.dist(p, q) >= min_dist:
            pairs.append((p, q))
    return pairs


def bm_suite(seed: int = 7341, n_paths: int = 10_000, n: int = 3) -> dict:
    """Brownian-motion character of the driftless flow.

    Chart marginals at t = 1 are standard normal; non-overlapping
    increments are uncorrelated; equal-gap increments share a law; the heat
    kernel obeys the short-time logarithmic asymptotics.
    """
    cfg = sde.SdeConfig(sigma=1.0, t_end=1.0, dt=1e-2, master_seed=seed)
    steps = cfg.steps
    marks = [0, int(0.3 * steps), int(0.6 * steps), int(0.9 * steps), steps]
    snaps = sde.em_chart_snapshots(sde.NoDrift(), sde.fixed_start(ag.barycenter(n)),
                                   cfg, n_paths, marks)
    gates = []
    worst_ks = 0.0
    for j in range(n - 1):
        worst_ks = max(worst_ks, vf.ks_statistic(snaps[-1][:, j], sps.norm.cdf))
    gates.append(vf.gate("chart-marginals-ks", worst_ks,
                         vf.ks_critical(n_paths), "<=", seed, (n_paths,)))
    inc1 = snaps[1] - snaps[0]
    inc2 = snaps[2] - snaps[1]
    corr = np.corrcoef(np.hstack([inc1, inc2]).T)[: n - 1, n - 1:]
    gates.append(vf.gate("increment-independence-corr", float(np.max(np.abs(corr))),
                         3.0 / np.sqrt(n_paths), "<=", seed, (n_paths,)))
    # Equal gaps 0.3: [0, 0.3] vs [0.6, 0.9], disjoint so the test is fair.
    inc_a = snaps[1] - snaps[0]
    inc_b = snaps[3] - snaps[2]
    gates.append(vf.energy_test("increment-stationarity-energy", inc_a, inc_b,
                                seed=seed, max_each=1000))
    rng = make_rng((seed, 77))
    t_short = 1e-3
    ratios = []
    for p, q in _varadhan_pairs(rng, n, 20):
        d2 = ag.dist(p, q) ** 2
        ratios.append(t_short * sde.heat_kernel_log_density(p, q, t_short)
                      / (-d2 / 2.0))
    ratios = np.asarray(ratios)
    gates.append(vf.gate("varadhan-ratio-lower", float(ratios.min()), 0.9,
                         ">=", seed, (20,)))
    gates.append(vf.gate("varadhan-ratio-upper", float(ratios.max()), 1.0,
                         "<=", seed, (20,)))
    return _report("bm-law", seed, gates)


# ---------------------------------------------------------------------------
# contraction


def contraction_suite(seed: int = 5150, n_pairs: int = 100, t_end: float = 1.0,
                      dt: float = 1e-3) -> dict:
    """Pathwise contraction for the decomposable shift of the 1..9 matrix,
    plus expansion-witness searches on the two-type controls.

    ``diag(1, -1)`` is kept as specified although it sits exactly on the
    decomposable boundary (lam = 0), where coupled pairs cannot expand; the
    companion gate uses ``diag(1, -1/2)``, which is genuinely outside the
    class and yields a witness.
    """
    a = TELEMA - 10.0 * np.eye(3)
    drift = sde.ReplicatorDrift(a)
    lam = 10.0
    rng = make_rng(seed)
    fail_a = fail_b = fail_c = 0
    for k in range(n_pairs):
        p0 = ag.ilr_inv(rng.standard_normal(2))
        q0 = ag.ilr_inv(rng.standard_normal(2))
        cfg = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=t_end, dt=dt,
                            master_seed=seed, record_every=1)
        rep = vf.contraction_report(sde.coupled_pair(drift, p0, q0, cfg, k), lam,
                                    seed)
        fail_a += not rep.monotone.passed
        fail_b += not rep.euclidean_decay.passed
        fail_c += not rep.integral_bound.passed
    gates = [
        vf.gate("pairs-dist-nonincreasing", float(fail_a), 0.0, "<=", seed,
                (n_pairs,)),
        vf.gate("pairs-euclidean-exponential", float(fail_b), 0.0, "<=", seed,
                (n_pairs,)),
        vf.gate("pairs-energy-integral", float(fail_c), 0.0, "<=", seed,
                (n_pairs,)),
    ]
    cfg_w = sde.SdeConfig(sigma=np.sqrt(2.0), t_end=1.0, dt=1e-2,
                          master_seed=seed, record_every=1)
    witness = vf.expansion_witness_search(sde.ReplicatorDrift(DIAG_PM1), cfg_w,
                                          2, range(100), start_scale=2.0)
    gates.append(vf.gate("negative-control-diag(1,-1)-witness",
                         1.0 if witness is None else 0.0, 0.0, "<=", seed, (100,),
                         detail={"witness": witness}))
    witness2 = vf.expansion_witness_search(sde.ReplicatorDrift(DIAG_EXPANDING),
                                           cfg_w, 2, range(100), start_scale=2.0)
    gates.append(vf.gate("negative-control-diag(1,-0.5)-witness",
                         1.0 if witness2 is None else 0.0, 0.0, "<=", seed, (100,),
                         detail={"witness": witness2}))
    return _report("contraction", seed, gates)


# ---------------------------------------------------------------------------
# wong-zakai


def wongzakai_suite(seed: int = 6011, n_paths: int = 10_000,
                    lambdas=(0.8, 0.4, 0.2, 0.1), t_end: float = 1.0,
                    dt: float = 1e-3, n_blocks: int = 10) -> dict:
    """Colored-noise replicator paths approach the diffusion as the
    correlation length shrinks.

    The fitness process has unit marginal variance, so the weak limit is the
    diffusion with amplitude sqrt(2); the energy distance to that reference
    must decrease along the lambda ladder within two blocked standard errors.
    """
    p0 = ag.barycenter(3)
    ref = sde.bm_terminal_ensemble(p0, t_end, np.sqrt(2.0), seed + 999, n_paths)
    ref_chart = ag.ilr(ref.terminal_states)
    stats, blocks = [], []
    for j, lam in enumerate(lambdas):
        cfg = sde.SdeConfig(sigma=1.0, t_end=t_end, dt=dt, master_seed=seed + j)
        ens = sde.wz_terminal_ensemble(lam, p0, cfg, n_paths)
        chart = ag.ilr(ens.terminal_states)
        per_block = [vf.two_sample_energy(chart[k::n_blocks], ref_chart[k::n_blocks])
                     for k in range(n_blocks)]
        blocks.append(np.asarray(per_block))
        stats.append(float(np.mean(per_block)))
    gates = []
    for j in range(len(lambdas) - 1):
        diff = blocks[j + 1] - blocks[j]
        se = float(diff.std(ddof=1) / np.sqrt(n_blocks))
        gates.append(vf.gate(
            f"energy-decrease-{lambdas[j]}-to-{lambdas[j + 1]}",
            float(diff.mean()), 2.0 * se, "<=", seed, (n_paths,),
            detail={"means": [stats[j], stats[j + 1]]}))
    return _report("wongzakai", seed, gates)


# ---------------------------------------------------------------------------
# donsker


def donsker_suite(seed: int = 8181, n_walks: int = 10_000,
                  ladder=(16, 64, 256)) -> dict:
    """Rescaled multiplicative random walks approach the chart normal law."""
    gates = []
    ks_by_n = []
    for n_steps in ladder:
        rng = make_rng((seed, n_steps))
        xi = sde.rademacher_steps(rng, n_walks * n_steps, 2).reshape(
            n_walks, n_steps, 2)
        terminal = xi.sum(axis=1) / np.sqrt(n_steps)
        ks = max(vf.ks_statistic(terminal[:, j], sps.norm.cdf) for j in range(2))
        ks_by_n.append(ks)
    for j in range(len(ladder) - 1):
        gates.append(vf.gate(f"ks-decreasing-{ladder[j]}-to-{ladder[j + 1]}",
                             ks_by_n[j + 1] - ks_by_n[j], 0.0, "<=", seed,
                             (n_walks,)))
    gates.append(vf.gate("final-ks", ks_by_n[-1], 0.05, "<=", seed, (n_walks,),
                         detail={"ks_by_n": ks_by_n}))
    return _report("donsker", seed, gates)


# ---------------------------------------------------------------------------
# transience


def transience_suite(seed: int = 9090, n_paths: int = 30_000,
                     t: float = 1e4, n: int = 3) -> dict:
    """Mass escapes to the corners, uniformly over the corner index."""
    ens = sde.bm_terminal_ensemble(ag.barycenter(n), t, 1.0, seed, n_paths)
    rep = vf.vertex_absorption_stats(ens.terminal_states, seed=seed)
    return _report("transience", seed, [rep])


# ---------------------------------------------------------------------------
# jko


def jko_suite(sigma0: float = 1.0, t_end: float = 1.0, ladder=(10, 20, 40),
              m: int = 1000) -> dict:
    """First-order convergence of the proximal scheme to the heat flow.

    The horizon is long enough that the step-size error dominates the fixed
    tail-discretization floor of the quantile grid (about 5e-4 at m = 1000),
    so the halving ratios measure the scheme, not the grid.
    """
    q0 = jk.gaussian_quantiles(m, 0.0, sigma0)
    errors = []
    for n_steps in ladder:
        rep, _ = jk.jko_flow_vs_heat(q0, t_end, n_steps, mu0=0.0, sigma0=sigma0)
        errors.append(rep.statistic)
    gates = []
    for j in range(len(ladder) - 1):
        ratio = errors[j + 1] / errors[j]
        gates.append(vf.gate(f"error-halving-{ladder[j]}-to-{ladder[j + 1]}-low",
                             ratio, 0.35, ">=", None, (m,)))
        gates.append(vf.gate(f"error-halving-{ladder[j]}-to-{ladder[j + 1]}-high",
                             ratio, 0.65, "<=", None, (m,)))
    gates.append(vf.gate("final-error", errors[-1], 0.01, "<=", None, (m,),
                         detail={"errors": errors}))
    return _report("jko", None, gates)


# ---------------------------------------------------------------------------
# cross-oracle identities


def cross_oracle_suite(seed: int = 3434, cases: int = 50) -> dict:
    """Identities tying independent formulas together.

    The two stationarity residuals agree for cross-entropy potentials; the
    Ito corrector matches half the finite-difference chart Laplacian of the
    inverse chart map; the metric tensor equals the softmax Jacobian; the
    chart drift of the payoff flow matches the finite-difference pushforward
    of the simplex vector field.
    """
    from .replicator import replicator_rhs

    rng = make_rng(seed)
    worst_resid = worst_corr = worst_push = worst_shah = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 6))
        a = rng.standard_normal((n, n)) * 2.0
        alpha = rng.uniform(0.3, 3.0, n)
        p = ag.ilr_inv(rng.standard_normal(n - 1))

        def v_grad(q, alpha=alpha):
            return -alpha / q

        def v_hess(q, alpha=alpha):
            return np.diag(alpha / q ** 2)

        worst_resid = max(worst_resid, abs(
            vf.hj_residual(a, v_grad, v_hess, p)
            - vf.dircond_residual(a, alpha, p)))
        x = ag.ilr(p)
        h = 1e-4
        lap = np.zeros(n)
        for j in range(n - 1):
            e = np.zeros(n - 1)
            e[j] = h
            lap += (ag.ilr_inv(x + e) - 2.0 * ag.ilr_inv(x)
                    + ag.ilr_inv(x - e)) / h ** 2
        worst_corr = max(worst_corr,
                         float(np.max(np.abs(0.5 * lap - ag.ito_corrector(p)))))
        t = 1e-5
        rhs = replicator_rhs(a, p)
        plus = ag.closure(p + t * rhs)
        minus = ag.closure(p - t * rhs)
        fd = (ag.ilr(plus) - ag.ilr(minus)) / (2.0 * t)
        worst_push = max(worst_push,
                         float(np.max(np.abs(fd - ilr_drift(a, x)))))
        worst_shah = max(worst_shah, float(np.max(np.abs(
            ag.shahshahani_inv(p) - ag.sfm_jacobian(ag.clr(p))))))
    gates = [
        vf.gate("gibbs-vs-dirichlet-residual", worst_resid, 1e-10, "<=", seed),
        vf.gate("ito-corrector-vs-chart-laplacian", worst_corr, 1e-6, "<=", seed),
        vf.gate("chart-drift-vs-pushforward", worst_push, 1e-6, "<=", seed),
        vf.gate("metric-tensor-vs-jacobian", worst_shah, 1e-12, "<=", seed),
    ]
    return _report("cross-oracle", seed, gates)


SUITES = {
    "geometry": geometry_suite,
    "dirichlet": dirichlet_suite,
    "contraction": contraction_suite,
    "donsker": donsker_suite,
    "wongzakai": wongzakai_suite,
    "transience": transience_suite,
    "jko": jko_suite,
}
