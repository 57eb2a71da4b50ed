"""Statistical and analytical verification utilities.

Includes the stationarity residuals of the Fokker-Planck equation (checked
pointwise, no PDE solves), Dirichlet moment gates, pathwise contraction
reports for synchronously coupled pairs, and the nonparametric two-sample
machinery (Kolmogorov-Smirnov, energy distance, exact one-dimensional
Wasserstein) used by the weak-convergence suites.

Every pass/fail gate is a pure function of its inputs and a recorded seed.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import aitchison as ag
from .errors import (
    DimensionMismatch,
    EmptySamples,
    GridMismatch,
    TooFewSamples,
)
from .payoff import as_payoff_matrix, potential_lambda
from .replicator import Trajectory
from .rng import make_rng


@dataclass
class TestReport:
    """One seeded, repeatable gate decision."""

    name: str
    statistic: float
    threshold: float
    direction: str  # "<=" or ">="
    passed: bool
    seed: int | None = None
    sizes: tuple = ()
    detail: dict | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "statistic": self.statistic,
               "threshold": self.threshold, "direction": self.direction,
               "pass": self.passed, "seed": self.seed, "sizes": list(self.sizes)}
        if self.detail is not None:
            out["detail"] = self.detail
        return out


def gate(name, statistic, threshold, direction, seed=None, sizes=(), detail=None):
    ok = statistic <= threshold if direction == "<=" else statistic >= threshold
    return TestReport(name, float(statistic), float(threshold), direction,
                      bool(ok), seed, tuple(sizes), detail)


# ---------------------------------------------------------------------------
# Stationarity residuals


def dircond_residual(a, alpha, p) -> float:
    """Residual whose vanishing on the whole simplex makes Dirichlet(alpha) invariant.

    (alpha - |alpha| p) . Ap + potential(p) - ||alpha - |alpha| p||^2
    + |alpha| (1 - ||p||^2).
    """
    a = as_payoff_matrix(a)
    alpha = np.asarray(alpha, dtype=float)
    p = np.asarray(p, dtype=float)
    if alpha.shape[-1] != a.shape[0] or p.shape[-1] != a.shape[0]:
        raise DimensionMismatch("alpha, p and the matrix disagree on n")
    tot = alpha.sum()
    w = alpha - tot * p
    ap = p @ a.T
    out = (np.sum(w * ap, axis=-1) + potential_lambda(a, p)
           - np.sum(w * w, axis=-1) + tot * (1.0 - np.sum(p * p, axis=-1)))
    return float(out) if np.ndim(out) == 0 else out


def hj_residual(a, v_grad_euclid, v_hess_euclid, p) -> float:
    """Signed residual of the Gibbs-invariance equation for exp(-V) measures.

    Assembles the generator action on V from user-supplied Euclidean
    derivatives via the chain rule: the second-order term contracts the
    squared inverse metric with the Hessian, the first-order term is twice
    the Ito corrector dotted with the gradient; subtracts the squared
    Shahshahani gradient and the payoff transport term, adds the potential.
    """
    a = as_payoff_matrix(a)
    p = np.asarray(p, dtype=float)
    grad = np.asarray(v_grad_euclid(p), dtype=float)
    hess = np.asarray(v_hess_euclid(p), dtype=float)
    ginv = ag.shahshahani_inv(p)
    big_g = ginv @ ginv
    b = ag.ito_corrector(p)
    lv = float(np.sum(big_g * hess)) + 2.0 * float(b @ grad)
    sg = ginv @ grad
    gamma_v = float(sg @ sg)
    z_a_v = float((a @ p) @ sg)
    return lv - gamma_v - z_a_v + potential_lambda(a, p)


# ---------------------------------------------------------------------------
# Nonparametric statistics


def ks_statistic(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.shape[0]
    if n < 100:
        raise TooFewSamples("need at least 100 samples")
    f = cdf(x)
    i = np.arange(1, n + 1)
    return float(np.max(np.maximum(i / n - f, f - (i - 1) / n)))


def ks_critical(n: int, level: float = 0.01) -> float:
    """Asymptotic critical value c(level)/sqrt(n)."""
    c = np.sqrt(-0.5 * np.log(level / 2.0))
    return float(c / np.sqrt(n))


def ks_test(name, samples, cdf, level: float = 0.01, seed=None) -> TestReport:
    d = ks_statistic(samples, cdf)
    return gate(name, d, ks_critical(len(samples), level), "<=", seed,
                 (len(samples),))


def _mean_pairwise_distance(a: np.ndarray, b: np.ndarray, block: int = 512) -> float:
    """Mean Euclidean distance over all pairs, blocked to bound memory."""
    total = 0.0
    for lo in range(0, a.shape[0], block):
        d = a[lo:lo + block, None, :] - b[None, :, :]
        total += np.sqrt((d ** 2).sum(axis=-1)).sum()
    return total / (a.shape[0] * b.shape[0])


def two_sample_energy(samples_a, samples_b) -> float:
    """Energy-distance statistic 2 E|A-B| - E|A-A'| - E|B-B'|."""
    a = np.atleast_2d(np.asarray(samples_a, dtype=float))
    b = np.atleast_2d(np.asarray(samples_b, dtype=float))
    if a.shape[0] == 1:
        a = a.T
    if b.shape[0] == 1:
        b = b.T
    if a.shape[0] < 100 or b.shape[0] < 100:
        raise TooFewSamples("need at least 100 samples per side")
    return float(2.0 * _mean_pairwise_distance(a, b)
                 - _mean_pairwise_distance(a, a)
                 - _mean_pairwise_distance(b, b))


def energy_test(name, samples_a, samples_b, n_permutations: int = 200,
                level: float = 0.01, seed: int = 0,
                max_each: int = 2000) -> TestReport:
    """Permutation-threshold energy test.

    Large inputs are subsampled deterministically to ``max_each`` per side so
    the 200 permutations stay tractable; the recorded sizes reflect this.
    """
    a = np.atleast_2d(np.asarray(samples_a, dtype=float))
    b = np.atleast_2d(np.asarray(samples_b, dtype=float))
    if a.shape[0] == 1:
        a = a.T
    if b.shape[0] == 1:
        b = b.T
    rng = make_rng(seed)
    if a.shape[0] > max_each:
        a = a[rng.choice(a.shape[0], max_each, replace=False)]
    if b.shape[0] > max_each:
        b = b[rng.choice(b.shape[0], max_each, replace=False)]
    stat = two_sample_energy(a, b)
    pooled = np.vstack([a, b])
    na = a.shape[0]
    perm_stats = np.empty(n_permutations)
    for k in range(n_permutations):
        idx = rng.permutation(pooled.shape[0])
        perm_stats[k] = two_sample_energy(pooled[idx[:na]], pooled[idx[na:]])
    threshold = float(np.quantile(perm_stats, 1.0 - level))
    return gate(name, stat, threshold, "<=", seed, (na, b.shape[0]))


def energy_distance_blocked(samples_a, samples_b, n_blocks: int = 10
                            ) -> tuple[float, float]:
    """Mean and standard error of the energy statistic over disjoint blocks.

    Splits both ensembles sequentially into ``n_blocks`` pieces and computes
    the statistic per piece; the spread gives an honest Monte Carlo error bar
    for comparing statistics across experiment arms.
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    stats = []
    for k in range(n_blocks):
        sa = a[k::n_blocks]
        sb = b[k::n_blocks]
        stats.append(two_sample_energy(sa, sb))
    stats = np.asarray(stats)
    return float(stats.mean()), float(stats.std(ddof=1) / np.sqrt(n_blocks))


def wasserstein_1d(samples_a, samples_b) -> float:
    """Empirical 2-Wasserstein distance between two scalar samples.

    Equal sizes: root mean square of sorted differences (exact).  Unequal
    sizes: both quantile functions are interpolated on a common level grid.
    """
    a = np.sort(np.asarray(samples_a, dtype=float).ravel())
    b = np.sort(np.asarray(samples_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise EmptySamples("need nonempty samples")
    if a.size == b.size:
        return float(np.sqrt(np.mean((a - b) ** 2)))
    k = a.size + b.size
    levels = (np.arange(1, k + 1) - 0.5) / k
    qa = np.quantile(a, levels)
    qb = np.quantile(b, levels)
    return float(np.sqrt(np.mean((qa - qb) ** 2)))


# ---------------------------------------------------------------------------
# Moment and occupancy gates


def dirichlet_moment_check(states: np.ndarray, alpha, name: str = "dirichlet-moments",
                           seed=None) -> TestReport:
    """First and second moments of an ensemble against Dirichlet(alpha).

    E[p_i] = alpha_i/|alpha| and E[p_i^2] = alpha_i (alpha_i + 1) /
    (|alpha| (|alpha| + 1)); the gate is 3 standard errors on every
    component; the reported statistic is the worst z-score.
    """
    p = np.asarray(states, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    tot = alpha.sum()
    n_samp = p.shape[0]
    mean_target = alpha / tot
    second_target = alpha * (alpha + 1.0) / (tot * (tot + 1.0))
    z_mean = (p.mean(axis=0) - mean_target) / (p.std(axis=0, ddof=1) / np.sqrt(n_samp))
    sq = p ** 2
    z_sec = (sq.mean(axis=0) - second_target) / (sq.std(axis=0, ddof=1) / np.sqrt(n_samp))
    worst = float(np.max(np.abs(np.concatenate([z_mean, z_sec]))))
    return gate(name, worst, 3.0, "<=", seed, (n_samp,),
                 detail={"z_mean": z_mean.tolist(), "z_second": z_sec.tolist()})


def vertex_absorption_stats(states: np.ndarray, level: float = 0.01,
                            name: str = "vertex-uniformity", seed=None) -> TestReport:
    """Chi-square uniformity of nearest-vertex indices of terminal states."""
    p = np.asarray(states, dtype=float)
    n = p.shape[1]
    counts = np.bincount(np.argmax(p, axis=1), minlength=n).astype(float)
    expected = p.shape[0] / n
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    threshold = float(sps.chi2.ppf(1.0 - level, df=n - 1))
    return gate(name, chi2, threshold, "<=", seed, (p.shape[0],),
                 detail={"counts": counts.tolist()})


# ---------------------------------------------------------------------------
# Pathwise contraction reports


@dataclass
class ContractionReport:
    """Results of the three pathwise checks on a synchronously coupled pair."""

    monotone: TestReport            # (a) log-ratio distance nonincreasing
    euclidean_decay: TestReport | None  # (b) ||p-q|| <= e^(-lam t) d0, lam > 0
    integral_bound: TestReport | None   # (c) d^2(t) + 2 lam int ||p-q||^2 <= d0^2

    @property
    def passed(self) -> bool:
        checks = [self.monotone, self.euclidean_decay, self.integral_bound]
        return all(c.passed for c in checks if c is not None)

    def to_dict(self) -> dict:
        return {"pass": self.passed,
                "monotone": self.monotone.to_dict(),
                "euclidean_decay": None if self.euclidean_decay is None
                else self.euclidean_decay.to_dict(),
                "integral_bound": None if self.integral_bound is None
                else self.integral_bound.to_dict()}


def contraction_report(pair: tuple[Trajectory, Trajectory], lam: float,
                       seed=None) -> ContractionReport:
    """Check the contraction estimates along one coupled pair.

    (a) the log-ratio distance never increases by more than 1e-6 + 10 dt in
    a step; (b) for lam > 0 the Euclidean gap stays below
    e^(-lam t) d0 (1 + 10 dt); (c) the trapezoid rule bound
    d(t)^2 + 2 lam int ||p-q||^2 ds <= d0^2 (1 + 10 dt).
    """
    ta, tb = pair
    if ta.times.shape != tb.times.shape or np.any(ta.times != tb.times):
        raise GridMismatch("coupled trajectories must share the time grid")
    times = ta.times
    dt = float(np.min(np.diff(times))) if times.size > 1 else 0.0
    d_log = ag.dist(ta.states, tb.states)
    d_euc = np.sqrt(((ta.states - tb.states) ** 2).sum(axis=1))
    slack = 1e-6 + 10.0 * dt
    increments = np.diff(d_log)
    worst_increase = float(increments.max()) if increments.size else 0.0
    rep_a = gate("dist-nonincreasing", worst_increase, slack, "<=", seed,
                  (times.size,),
                  detail=None if increments.size == 0 or worst_increase <= slack
                  else {"step": int(np.argmax(increments)) + 1})
    rep_b = rep_c = None
    if lam > 0:
        bound = np.exp(-lam * times) * d_log[0] * (1.0 + 10.0 * dt)
        gap = d_euc - bound
        rep_b = gate("euclidean-exponential-decay", float(gap.max()), 0.0,
                      "<=", seed, (times.size,))
        integral = np.trapezoid(d_euc ** 2, times)
        lhs = d_log[-1] ** 2 + 2.0 * lam * integral
        rep_c = gate("energy-integral-bound", float(lhs),
                      d_log[0] ** 2 * (1.0 + 10.0 * dt), "<=", seed,
                      (times.size,))
    return ContractionReport(rep_a, rep_b, rep_c)


def expansion_witness_search(drift, cfg_base, n: int, seeds: range,
                             start_scale: float = 1.0,
                             threshold: float = 1e-9):
    """Look for a coupled pair whose log-ratio distance increases on a step.

    The threshold only guards against rounding: under synchronous coupling
    the noise cancels in the distance exactly, so any genuine increase is a
    structural expansion.  Start points are drawn in the chart at the given
    scale from each seed's stream; returns (seed, step index) of the first
    witness or None.
    """
    from . import sde as engine

    for s in seeds:
        rng = make_rng((987_001, s))
        x = start_scale * rng.standard_normal(n - 1)
        y = start_scale * rng.standard_normal(n - 1)
        cfg = cfg_base.__class__(sigma=cfg_base.sigma, t_end=cfg_base.t_end,
                                 dt=cfg_base.dt, master_seed=s,
                                 record_every=cfg_base.record_every)
        pair = engine.coupled_pair(drift, ag.ilr_inv(x), ag.ilr_inv(y), cfg)
        d_log = ag.dist(pair[0].states, pair[1].states)
        bad = np.flatnonzero(np.diff(d_log) > threshold)
        if bad.size:
            return s, int(bad[0]) + 1
    return None
