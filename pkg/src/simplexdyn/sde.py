"""Stochastic simulation on the simplex.

Everything integrates in the isometric log-ratio chart, where the driftless
process is plain Brownian motion (making exact sampling possible via
``bm_exact``) and drifted processes have additive noise with a globally
Lipschitz drift, so Euler-Maruyama steps can never leave the state space.

Drift kinds:

* ``NoDrift``            - Brownian motion on the simplex.
* ``ReplicatorDrift``    - noisy replicator flow for a payoff matrix.
* ``DirichletLangevinDrift`` - gradient flow of the cross-entropy potential
  V(p) = -sum_i alpha_i ln p_i, whose invariant law is Dirichlet(alpha).

Ensembles derive trajectory ``i`` from ``spawn(master_seed, i)``; results
are bit-identical however the work is chunked.
"""

from dataclasses import dataclass, field

import numpy as np

from . import aitchison as ag
from .errors import (
    DimensionMismatch,
    NonpositiveTime,
    StepVsCorrelation,
    WalkTooShort,
)
from .payoff import as_payoff_matrix
from .replicator import Trajectory
from .rng import make_rng, spawn

DEFAULT_CHUNK = 2048


@dataclass(frozen=True)
class SdeConfig:
    """Noise amplitude, horizon, step, recording stride, and master seed.

    ``sigma = 1`` is the plain Brownian-motion convention; the invariance
    suite uses ``sigma = sqrt(2)``.
    """

    sigma: float
    t_end: float
    dt: float
    master_seed: int
    record_every: int = 1

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if not (self.dt > 0 and self.t_end >= self.dt):
            raise ValueError("need dt > 0 and t_end >= dt")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "t_end": self.t_end, "dt": self.dt,
                "master_seed": self.master_seed, "record_every": self.record_every}


class NoDrift:
    """Driftless diffusion; the chart process is Brownian motion."""

    label = "none"

    def chart_drift(self, x: np.ndarray) -> np.ndarray:
        return np.zeros_like(x)

    def to_dict(self) -> dict:
        return {"kind": self.label}


@dataclass(eq=False)
class ReplicatorDrift:
    """Chart drift psi A sfm(psi^T x) of the noisy replicator flow."""

    a: np.ndarray
    label: str = field(default="replicator", init=False)

    def __post_init__(self):
        self.a = as_payoff_matrix(self.a)

    def chart_drift(self, x: np.ndarray) -> np.ndarray:
        psi = ag.contrast_matrix(self.a.shape[0])
        return (ag.sfm(x @ psi) @ self.a.T) @ psi.T

    def to_dict(self) -> dict:
        return {"kind": self.label, "a": self.a.tolist()}


@dataclass(eq=False)
class DirichletLangevinDrift:
    """Chart drift psi (alpha - |alpha| sfm(psi^T x)); invariant law Dirichlet(alpha)."""

    alpha: np.ndarray

    label: str = field(default="dirichlet-langevin", init=False)

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        if np.any(self.alpha <= 0) or self.alpha.ndim != 1:
            raise ValueError("alpha must be a vector of positive reals")

    def chart_drift(self, x: np.ndarray) -> np.ndarray:
        psi = ag.contrast_matrix(self.alpha.shape[0])
        p = ag.sfm(x @ psi)
        return (self.alpha - self.alpha.sum() * p) @ psi.T

    def to_dict(self) -> dict:
        return {"kind": self.label, "alpha": self.alpha.tolist()}


@dataclass
class Ensemble:
    """Terminal states with per-trajectory stream provenance."""

    terminal_states: np.ndarray          # (N, n)
    seeds: np.ndarray                    # spawn indices under master_seed
    master_seed: int
    config: dict

    def __post_init__(self):
        if self.terminal_states.shape[0] < 1:
            raise ValueError("an ensemble needs at least one trajectory")


# ---------------------------------------------------------------------------
# Exact Brownian motion


def bm_exact(p0, t: float, sigma: float, seed) -> np.ndarray:
    """Exact draw of the driftless diffusion at time t: perturb(p0, sfm(B_t)).

    ``B_t`` is an n-dimensional centered normal with variance sigma^2 t per
    component; there is no discretization error.
    """
    p0 = ag.as_composition(p0)
    if t < 0:
        raise NonpositiveTime("t must be >= 0")
    if t == 0:
        return p0
    rng = make_rng(seed)
    b = sigma * np.sqrt(t) * rng.standard_normal(p0.shape[-1])
    return ag.perturb(p0, ag.sfm(b))


def bm_terminal_ensemble(p0, t: float, sigma: float, master_seed: int,
                         n_paths: int, chunk: int = DEFAULT_CHUNK) -> Ensemble:
    """Ensemble of exact draws; trajectory i uses stream (master_seed, i)."""
    p0 = ag.as_composition(p0)
    n = p0.shape[-1]
    x0 = ag.ilr(p0)
    psi = ag.contrast_matrix(n)
    out = np.empty((n_paths, n))
    scale = sigma * np.sqrt(t)
    for lo in range(0, n_paths, chunk):
        hi = min(lo + chunk, n_paths)
        bs = np.stack([spawn(master_seed, i).standard_normal(n)
                       for i in range(lo, hi)])
        out[lo:hi] = ag.ilr_inv(x0 + scale * (bs @ psi.T))
    return Ensemble(out, np.arange(n_paths), master_seed,
                    {"kind": "bm-exact", "t": t, "sigma": sigma})


def bm_path(p0, cfg: SdeConfig, trajectory_index: int = 0) -> Trajectory:
    """Path with exact Gaussian chart increments N(0, sigma^2 dt id)."""
    return sde_path(NoDrift(), p0, cfg, trajectory_index, scheme="bm-exact-increments")


def heat_kernel_log_density(p, q, t: float) -> float:
    """Log transition density of the unit-noise diffusion w.r.t. the
    invariant measure; safe where the density itself underflows."""
    if t <= 0:
        raise NonpositiveTime("t must be > 0")
    p = ag.as_composition(p)
    q = ag.as_composition(q, p.shape[-1])
    n = p.shape[-1]
    d2 = ag.dist(p, q) ** 2
    return float(-(n - 1) / 2.0 * np.log(2.0 * np.pi * t) - d2 / (2.0 * t))


def heat_kernel_density(p, q, t: float) -> float:
    """Transition density of the unit-noise diffusion w.r.t. the invariant measure.

    (2 pi t)^(-(n-1)/2) exp(-dist(p,q)^2 / 2t); satisfies the short-time
    asymptotics t ln p_t -> -dist^2/2.
    """
    return float(np.exp(heat_kernel_log_density(p, q, t)))


# ---------------------------------------------------------------------------
# Euler-Maruyama in the chart


def sde_path(drift, p0, cfg: SdeConfig, trajectory_index: int = 0,
             scheme: str = "euler-maruyama-ilr") -> Trajectory:
    """Single Euler-Maruyama trajectory, recorded every ``record_every`` steps."""
    p0 = ag.as_composition(p0)
    d = p0.shape[-1] - 1
    rng = spawn(cfg.master_seed, trajectory_index)
    noise = rng.standard_normal((cfg.steps, d))
    x = ag.ilr(p0)
    root_dt = np.sqrt(cfg.dt)
    times = [0.0]
    chart = [x]
    for k in range(cfg.steps):
        x = x + drift.chart_drift(x) * cfg.dt + cfg.sigma * root_dt * noise[k]
        if (k + 1) % cfg.record_every == 0 or k + 1 == cfg.steps:
            times.append((k + 1) * cfg.dt)
            chart.append(x)
    states = ag.ilr_inv(np.asarray(chart))
    return Trajectory(np.asarray(times), states, scheme=scheme,
                      seed=trajectory_index)


def coupled_pair(drift, p0, q0, cfg: SdeConfig,
                 pair_index: int = 0) -> tuple[Trajectory, Trajectory]:
    """Two trajectories driven by identical noise increments (synchronous coupling)."""
    p0 = ag.as_composition(p0)
    q0 = ag.as_composition(q0, p0.shape[-1])
    d = p0.shape[-1] - 1
    rng = spawn(cfg.master_seed, pair_index)
    noise = rng.standard_normal((cfg.steps, d))
    root_dt = np.sqrt(cfg.dt)
    x, y = ag.ilr(p0), ag.ilr(q0)
    times = [0.0]
    xs, ys = [x], [y]
    for k in range(cfg.steps):
        kick = cfg.sigma * root_dt * noise[k]
        x = x + drift.chart_drift(x) * cfg.dt + kick
        y = y + drift.chart_drift(y) * cfg.dt + kick
        if (k + 1) % cfg.record_every == 0 or k + 1 == cfg.steps:
            times.append((k + 1) * cfg.dt)
            xs.append(x)
            ys.append(y)
    t = np.asarray(times)
    return (Trajectory(t, ag.ilr_inv(np.asarray(xs)), "em-coupled", pair_index),
            Trajectory(t, ag.ilr_inv(np.asarray(ys)), "em-coupled", pair_index))


def _em_chart_snapshots(drift, start_chart, cfg: SdeConfig, n_paths: int,
                        snap_steps, chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """Chart states of all paths at the requested step indices.

    ``start_chart(rng)`` draws (or returns) the initial chart point using the
    per-trajectory stream; the stream then supplies that trajectory's noise
    block, so results do not depend on the chunking.
    Returns shape (len(snap_steps), n_paths, n-1).
    """
    snap_steps = sorted(set(int(s) for s in snap_steps))
    if snap_steps and snap_steps[-1] > cfg.steps:
        raise ValueError("snapshot beyond the end of the run")
    probe = start_chart(make_rng(0))
    d = probe.shape[-1]
    out = np.empty((len(snap_steps), n_paths, d))
    root_dt = np.sqrt(cfg.dt)
    snap_of_step = {s: j for j, s in enumerate(snap_steps)}
    # Keep each chunk's noise block around 64 MB.
    chunk = max(32, min(chunk, int(8_000_000 / max(cfg.steps * d, 1)) or 32))
    for lo in range(0, n_paths, chunk):
        hi = min(lo + chunk, n_paths)
        starts, blocks = [], []
        for i in range(lo, hi):
            rng = spawn(cfg.master_seed, i)
            starts.append(start_chart(rng))
            blocks.append(rng.standard_normal((cfg.steps, d)))
        x = np.stack(starts)
        noise = np.stack(blocks)
        if 0 in snap_of_step:
            out[snap_of_step[0], lo:hi] = x
        for k in range(cfg.steps):
            x = x + drift.chart_drift(x) * cfg.dt + cfg.sigma * root_dt * noise[:, k, :]
            j = snap_of_step.get(k + 1)
            if j is not None:
                out[j, lo:hi] = x
    return out


def fixed_start(p0):
    """Start function for a deterministic initial composition."""
    x0 = ag.ilr(ag.as_composition(p0))

    def start(rng):
        return x0.copy()

    return start


def dirichlet_start(alpha):
    """Start function drawing the initial composition from Dirichlet(alpha)."""
    alpha = np.asarray(alpha, dtype=float)

    def start(rng):
        return ag.ilr(ag.as_composition(rng.dirichlet(alpha)))

    return start


def em_terminal_ensemble(drift, start_chart, cfg: SdeConfig, n_paths: int,
                         chunk: int = DEFAULT_CHUNK) -> Ensemble:
    """Euler-Maruyama ensemble, terminal states only."""
    snaps = _em_chart_snapshots(drift, start_chart, cfg, n_paths,
                                [cfg.steps], chunk)
    return Ensemble(ag.ilr_inv(snaps[0]), np.arange(n_paths), cfg.master_seed,
                    {"kind": "em", "drift": drift.to_dict(), **cfg.to_dict()})


def em_chart_snapshots(drift, start_chart, cfg: SdeConfig, n_paths: int,
                       snap_steps, chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """Public wrapper kept thin for statistical tests on increments."""
    return _em_chart_snapshots(drift, start_chart, cfg, n_paths, snap_steps, chunk)


# ---------------------------------------------------------------------------
# Colored-noise (Ornstein-Uhlenbeck) fitness and its replicator flow


def _ou_block(rng, n_points: int, n: int, rho: float) -> np.ndarray:
    """Stationary AR(1) with marginal variance 1: y_{k+1} = rho y_k + sqrt(1-rho^2) xi."""
    innov = rng.standard_normal((n_points, n))
    y = np.empty((n_points, n))
    y[0] = innov[0]
    s = np.sqrt(1.0 - rho * rho)
    for k in range(1, n_points):
        y[k] = rho * y[k - 1] + s * innov[k]
    return y


def ou_fitness_path(lambda_corr: float, n: int, cfg: SdeConfig, seed) -> np.ndarray:
    """Exact stationary Ornstein-Uhlenbeck fitness samples on the step grid.

    Marginal variance 1 per component, autocorrelation exp(-|s-t|/lambda^2),
    independent components; shape (steps+1, n).
    """
    if lambda_corr <= 0:
        raise ValueError("lambda_corr must be > 0")
    rho = float(np.exp(-cfg.dt / lambda_corr ** 2))
    return _ou_block(make_rng(seed), cfg.steps + 1, n, rho)


def wong_zakai_path(lambda_corr: float, p0, cfg: SdeConfig,
                    trajectory_index: int = 0) -> Trajectory:
    """Replicator flow in an Ornstein-Uhlenbeck fitness landscape.

    The chart drift is y_t projected by the contrast matrix and scaled by
    1/lambda, integrated by Simpson's rule (the RK4 reduction for a state
    independent drift) on a half-step fitness grid.  Requires
    dt <= lambda^2 / 10 so the step resolves the correlation time.
    """
    p0 = ag.as_composition(p0)
    if lambda_corr <= 0:
        raise ValueError("lambda_corr must be > 0")
    if cfg.dt > lambda_corr ** 2 / 10.0:
        raise StepVsCorrelation("dt must be <= lambda_corr^2 / 10")
    n = p0.shape[-1]
    psi = ag.contrast_matrix(n)
    rng = spawn(cfg.master_seed, trajectory_index)
    rho_half = float(np.exp(-(cfg.dt / 2.0) / lambda_corr ** 2))
    y = _ou_block(rng, 2 * cfg.steps + 1, n, rho_half)
    f = (y @ psi.T) / lambda_corr
    x = ag.ilr(p0)
    times = [0.0]
    chart = [x]
    for k in range(cfg.steps):
        x = x + (cfg.dt / 6.0) * (f[2 * k] + 4.0 * f[2 * k + 1] + f[2 * k + 2])
        if (k + 1) % cfg.record_every == 0 or k + 1 == cfg.steps:
            times.append((k + 1) * cfg.dt)
            chart.append(x)
    return Trajectory(np.asarray(times), ag.ilr_inv(np.asarray(chart)),
                      scheme="wong-zakai-simpson", seed=trajectory_index)


def wz_terminal_ensemble(lambda_corr: float, p0, cfg: SdeConfig, n_paths: int,
                         chunk: int = 1024) -> Ensemble:
    """Terminal states of many colored-noise replicator paths (vectorized)."""
    p0 = ag.as_composition(p0)
    if cfg.dt > lambda_corr ** 2 / 10.0:
        raise StepVsCorrelation("dt must be <= lambda_corr^2 / 10")
    n = p0.shape[-1]
    psi = ag.contrast_matrix(n)
    x0 = ag.ilr(p0)
    rho_half = float(np.exp(-(cfg.dt / 2.0) / lambda_corr ** 2))
    s = np.sqrt(1.0 - rho_half * rho_half)
    out = np.empty((n_paths, n))
    m = 2 * cfg.steps + 1
    for lo in range(0, n_paths, chunk):
        hi = min(lo + chunk, n_paths)
        innov = np.stack([spawn(cfg.master_seed, i).standard_normal((m, n))
                          for i in range(lo, hi)])
        y = np.empty_like(innov)
        y[:, 0] = innov[:, 0]
        for k in range(1, m):
            y[:, k] = rho_half * y[:, k - 1] + s * innov[:, k]
        f = (y @ psi.T) / lambda_corr
        x = np.tile(x0, (hi - lo, 1))
        for k in range(cfg.steps):
            x = x + (cfg.dt / 6.0) * (f[:, 2 * k] + 4.0 * f[:, 2 * k + 1]
                                      + f[:, 2 * k + 2])
        out[lo:hi] = ag.ilr_inv(x)
    return Ensemble(out, np.arange(n_paths), cfg.master_seed,
                    {"kind": "wong-zakai", "lambda_corr": lambda_corr,
                     **cfg.to_dict()})


# ---------------------------------------------------------------------------
# Random walks and diffusive rescaling


def _validate_step_sampler(sampler, n: int, rng, draws: int = 10_000):
    """5-sigma moment gate: centered log-ratio mean 0, chart covariance identity."""
    f = sampler(rng, draws)
    f = ag.as_composition(f, n)
    c = ag.clr(f)
    mean = c.mean(axis=0)
    se_mean = c.std(axis=0, ddof=1) / np.sqrt(draws)
    if np.any(np.abs(mean) > 5.0 * np.maximum(se_mean, 1e-12)):
        raise ValueError("step sampler violates the zero-mean condition")
    z = ag.ilr(f)
    cov = np.cov(z.T)
    cov = np.atleast_2d(cov)
    se_cov = np.sqrt((np.outer(np.diag(cov), np.diag(cov)) + cov ** 2) / draws)
    if np.any(np.abs(cov - np.eye(n - 1)) > 5.0 * np.maximum(se_cov, 1e-12)):
        raise ValueError("step sampler violates the identity-covariance condition")


def rademacher_steps(rng, size: int, d: int) -> np.ndarray:
    """Default step law: chart coordinates uniform on {-1, +1}^d."""
    return rng.integers(0, 2, size=(size, d)) * 2.0 - 1.0


def simplex_random_walk(p0, steps: int, step_seed, step_sampler=None) -> np.ndarray:
    """Multiplicative random walk p_(k+1) = perturb(p_k, f_(k+1)).

    The default step law has chart coordinates uniform on {-1, +1}^(n-1),
    hence zero-mean unit-covariance increments.  A custom ``step_sampler``
    (rng, size) -> (size, n) compositions is moment-checked on 10^4 draws
    before use.  Returns the (steps+1, n) array of visited compositions.
    """
    p0 = ag.as_composition(p0)
    if steps < 0:
        raise ValueError("steps must be >= 0")
    n = p0.shape[-1]
    rng = make_rng(step_seed)
    if steps == 0:
        return p0[None, :]
    if step_sampler is None:
        xi = rademacher_steps(rng, steps, n - 1)
    else:
        _validate_step_sampler(step_sampler, n, make_rng((step_seed, 1)))
        xi = ag.ilr(ag.as_composition(step_sampler(rng, steps), n))
    chart = ag.ilr(p0) + np.vstack([np.zeros(n - 1), np.cumsum(xi, axis=0)])
    return ag.ilr_inv(chart)


def donsker_rescaled(walk: np.ndarray, n_steps: int, t_grid) -> Trajectory:
    """Diffusive rescaling of a walk: (1/sqrt(n_steps)) powering at time n_steps*t.

    Between integer walk indices the increment is interpolated in the group
    sense, which is linear interpolation in the chart.
    """
    walk = np.asarray(walk, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    k_max = walk.shape[0] - 1
    s = n_steps * t_grid
    if np.any(s > k_max + 1e-9):
        raise WalkTooShort("walk has too few steps for max(t_grid) * n_steps")
    chart = ag.ilr(walk)
    base = np.minimum(np.floor(s).astype(int), k_max)
    frac = s - base
    nxt = np.minimum(base + 1, k_max)
    x = chart[base] + frac[:, None] * (chart[nxt] - chart[base])
    x /= np.sqrt(n_steps)
    return Trajectory(t_grid, ag.ilr_inv(x), scheme="donsker-rescaled")
