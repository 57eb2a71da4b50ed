"""Deterministic replicator flow, integrated in the isometric log-ratio chart.

The replicator equation dp_i/dt = p_i ((Ap)_i - p.Ap) becomes, after the
chart change x = ilr(p), the ordinary differential equation

    dx/dt = psi A sfm(psi^T x)

whose right-hand side is bounded and globally Lipschitz.  Integrating there
keeps every state a valid composition by construction, with no projection
tricks near the boundary.
"""

from dataclasses import dataclass

import numpy as np

from . import aitchison as ag
from .errors import DimensionMismatch, StepTooLarge, WrongDimension
from .payoff import as_payoff_matrix

# An RK4 stage moving farther than this in the chart means dt or A is absurd.
MAX_STAGE_MOVE = 1e3


@dataclass(frozen=True)
class OdeConfig:
    t_end: float
    dt: float
    record_every: int = 1

    def __post_init__(self):
        if not (self.t_end > 0 and self.dt > 0):
            raise ValueError("t_end and dt must be positive")
        if self.dt > self.t_end:
            raise ValueError("dt must not exceed t_end")
        if self.t_end / self.dt > 1e8:
            raise ValueError("more than 1e8 steps requested")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class Trajectory:
    """Time-stamped states with the scheme and seed that produced them."""

    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)
    scheme: str
    seed: int | None = None

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def terminal(self) -> np.ndarray:
        return self.states[-1]

    def ilr_states(self) -> np.ndarray:
        return ag.ilr(self.states)


def replicator_rhs(a, p) -> np.ndarray:
    """Simplex-coordinate vector field p_i ((Ap)_i - p.Ap); sums to zero."""
    a = as_payoff_matrix(a)
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != a.shape[0]:
        raise DimensionMismatch("matrix and state sizes differ")
    ap = p @ a.T
    mean_fitness = np.sum(p * ap, axis=-1, keepdims=True)
    return p * (ap - mean_fitness)


def ilr_drift(a, x) -> np.ndarray:
    """Chart vector field psi A sfm(psi^T x); bounded by ||psi|| ||A||."""
    a = as_payoff_matrix(a)
    x = np.asarray(x, dtype=float)
    psi = ag.contrast_matrix(a.shape[0])
    return (ag.sfm(x @ psi) @ a.T) @ psi.T


def _rk4_step(f, x, dt):
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    for k in (k1, k2, k3, k4):
        if np.max(np.abs(k)) * dt > MAX_STAGE_MOVE:
            raise StepTooLarge("an RK4 stage moved the chart point by > 1e3")
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_replicator(a, p0, cfg: OdeConfig) -> Trajectory:
    """Fixed-step classical RK4 on the chart drift, mapped back to the simplex."""
    a = as_payoff_matrix(a)
    p0 = ag.as_composition(p0, a.shape[0])
    steps = int(round(cfg.t_end / cfg.dt))
    f = lambda x: ilr_drift(a, x)
    x = ag.ilr(p0)
    times = [0.0]
    chart = [x]
    for k in range(1, steps + 1):
        x = _rk4_step(f, x, cfg.dt)
        if k % cfg.record_every == 0 or k == steps:
            times.append(k * cfg.dt)
            chart.append(x)
    states = ag.ilr_inv(np.asarray(chart))
    return Trajectory(np.asarray(times), states, scheme="rk4-ilr")


def phase_portrait(a, grid_per_side: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Replicator arrows on the interior barycentric lattice (three types only).

    Resolution g yields (g-1)(g-2)/2 interior points.
    """
    a = as_payoff_matrix(a)
    if a.shape[0] != 3:
        raise WrongDimension("phase portraits are drawn for n = 3 only")
    if grid_per_side < 2:
        raise ValueError("grid_per_side must be >= 2")
    from .grids import lattice

    pts = lattice(3, grid_per_side, interior_only=True)
    return [(p, replicator_rhs(a, p)) for p in pts]
