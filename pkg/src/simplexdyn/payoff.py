"""Static analysis of payoff matrices.

Centers on the structure A = -lambda*id + u (x) 1 + 1 (x) v, which
characterizes exactly the payoff matrices whose replicator flow is
non-expansive in the log-ratio distance (with exponential contraction of
the Euclidean distance when lambda > 0).  Provides the decomposition, the
potential, conditional definiteness on the zero-sum plane, Nash/ESS
reporting, and a randomized monotonicity probe.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import aitchison as ag
from .errors import (
    DimensionMismatch,
    LambdaNonzero,
    LambdaZero,
    NotNash,
    TooLarge,
)
from .grids import lattice_with_target
from .rng import make_rng

MATRIX_TOL = 1e-9


def as_payoff_matrix(a) -> np.ndarray:
    """Validate an n x n real matrix with n >= 2."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
        raise DimensionMismatch(f"payoff matrix must be square with n >= 2, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("payoff matrix entries must be finite")
    return m


@dataclass(frozen=True)
class Decomposition:
    """Certificate A = -lam*id + u (x) 1 + 1 (x) v, gauge u[0] = 0."""

    lam: float
    u: np.ndarray
    v: np.ndarray
    residual: float

    @property
    def n(self) -> int:
        return self.u.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (-self.lam * np.eye(self.n)
                + np.outer(self.u, np.ones(self.n))
                + np.outer(np.ones(self.n), self.v))

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "u": self.u.tolist(),
                "v": self.v.tolist(), "residual": self.residual}


class Definiteness(str, Enum):
    NEGATIVE_DEFINITE = "NegativeDefinite"
    NEGATIVE_SEMI_DEFINITE = "NegativeSemiDefinite"
    INDEFINITE = "Indefinite"


@dataclass(frozen=True)
class DefinitenessReport:
    classification: Definiteness
    rayleigh_lambda: float

    def to_dict(self) -> dict:
        return {"classification": self.classification.value,
                "rayleigh_lambda": self.rayleigh_lambda}


class EssStatus(str, Enum):
    CERTIFIED = "certified"
    SUFFICIENT_ONLY = "sufficient-condition-only"
    FALSE = "false"


def potential_lambda(a, p) -> float:
    """Potential sum_i a_ii p_i - p.Ap.

    Vanishes identically iff the group-invariant reference measure is
    invariant for the noisy replicator flow; for matrices with a constant
    pair sum c it equals -(c/2)(1 - ||p||^2).
    """
    a = as_payoff_matrix(a)
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != a.shape[0]:
        raise DimensionMismatch("matrix and composition sizes differ")
    quad = np.einsum("...i,ij,...j->...", p, a, p)
    lin = p @ np.diag(a)
    out = lin - quad
    return float(out) if np.ndim(out) == 0 else out


def definiteness(a, zero_tol: float = 1e-10) -> DefinitenessReport:
    """Classify the quadratic form of A restricted to the zero-sum plane.

    Projects the symmetric part with the contrast matrix,
    B = psi (A + A^T)/2 psi^T, and classifies by B's largest eigenvalue;
    ``rayleigh_lambda`` is its negative (the contraction rate when the form
    is negative definite).
    """
    a = as_payoff_matrix(a)
    psi = ag.contrast_matrix(a.shape[0])
    b = psi @ ((a + a.T) / 2.0) @ psi.T
    top = float(np.linalg.eigvalsh(b)[-1])
    if top < -zero_tol:
        cls = Definiteness.NEGATIVE_DEFINITE
    elif top <= zero_tol:
        cls = Definiteness.NEGATIVE_SEMI_DEFINITE
    else:
        cls = Definiteness.INDEFINITE
    return DefinitenessReport(cls, -top)


def sum_condition(a, tol: float = MATRIX_TOL) -> float | None:
    """Common value c of a_ij + a_ji - a_ii - a_jj over all i != j, if any.

    c = 0 means the reference measure is invariant for the noisy replicator
    flow; c > 0 makes A a Dirichlet-invariance candidate with |alpha| = c/2.
    """
    a = as_payoff_matrix(a)
    d = np.diag(a)
    vals = a + a.T - d[:, None] - d[None, :]
    off = vals[~np.eye(a.shape[0], dtype=bool)]
    c = float(off[0])
    if np.all(np.abs(off - c) <= tol):
        return c
    return None


def decompose(a, tol: float = MATRIX_TOL) -> Decomposition | None:
    """Constructive test for A = -lam*id + u (x) 1 + 1 (x) v.

    Gauge u[0] = 0.  Returns None when the residual of the reconstruction
    exceeds ``tol`` or the implied lam is negative; lam in [-1e-12, 0] is
    clamped to zero.
    """
    a = as_payoff_matrix(a)
    n = a.shape[0]
    lam = (a[0, 1] + a[1, 0] - a[0, 0] - a[1, 1]) / 2.0
    if lam < -1e-12:
        return None
    lam = max(lam, 0.0)
    v = a[0].copy()
    v[0] = a[0, 0] + lam
    u = np.empty(n)
    u[0] = 0.0
    u[1:] = a[1:, 0] - v[0]
    cand = Decomposition(lam, u, v, 0.0)
    residual = float(np.max(np.abs(a - cand.reconstruct())))
    if residual > tol:
        return None
    return Decomposition(lam, u, v, residual)


def interior_ne_decomposed(d: Decomposition, n: int | None = None) -> np.ndarray | None:
    """Interior Nash equilibrium of a decomposed matrix with lam > 0.

    Shift u to a nonnegative vector with zero minimum (equilibria are
    unchanged by constant shifts of u); an interior equilibrium exists iff
    lam > |u_shifted|, in which case p*_i = u_i/lam + (1 - |u|/lam)/n.
    """
    if n is not None and n != d.n:
        raise DimensionMismatch("decomposition size differs from n")
    if d.lam <= 0.0:
        raise LambdaZero("interior equilibrium formula needs lam > 0")
    n = d.n
    shifted = d.u - d.u.min()
    total = shifted.sum()
    if d.lam <= total:
        return None
    delta = (1.0 - total / d.lam) / n
    return shifted / d.lam + delta


def nash_set_zero_lambda(d: Decomposition, tol: float = MATRIX_TOL) -> list[int]:
    """Argmax indices of u for a lam = 0 decomposition (0-based).

    The equilibrium set is the face spanned by these vertices; an
    evolutionarily stable strategy exists iff the set is a singleton.
    """
    if d.lam != 0.0:
        raise LambdaNonzero("equilibrium face formula needs lam = 0")
    top = d.u.max()
    return [int(i) for i in np.flatnonzero(d.u >= top - tol)]


def is_nash(a, p, tol: float = MATRIX_TOL) -> bool:
    """Equilibrium test: max_i (Ap)_i <= p.Ap + tol for p in the closed simplex."""
    a = as_payoff_matrix(a)
    p = np.asarray(p, dtype=float)
    ap = a @ p
    return bool(ap.max() <= p @ ap + tol)


def _stability_grid(n: int) -> np.ndarray:
    return lattice_with_target(n, 10_000)


def is_ess(a, p, tol: float = MATRIX_TOL) -> EssStatus:
    """Evolutionary stability of a Nash equilibrium ``p``.

    Certified outcomes come from structure: a decomposition with lam > 0
    whose interior equilibrium is ``p``; a lam = 0 decomposition whose
    unique best vertex is ``p``; or an interior ``p`` with a conditionally
    negative definite matrix.  Otherwise the stability inequality is probed
    on a deterministic grid of about 10^4 closed-simplex points, which can
    only ever certify "sufficient-condition-only".
    """
    a = as_payoff_matrix(a)
    p = np.asarray(p, dtype=float)
    if not is_nash(a, p, tol):
        raise NotNash("stability test requires a Nash equilibrium")
    d = decompose(a)
    if d is not None and d.lam > 0.0:
        star = interior_ne_decomposed(d)
        if star is not None and np.max(np.abs(star - p)) <= 1e-6:
            return EssStatus.CERTIFIED
    if d is not None and d.lam == 0.0:
        face = nash_set_zero_lambda(d)
        if len(face) == 1:
            vertex = np.zeros(d.n)
            vertex[face[0]] = 1.0
            if np.max(np.abs(vertex - p)) <= 1e-6:
                return EssStatus.CERTIFIED
    if np.all(p > tol):
        rep = definiteness(a)
        if rep.classification is Definiteness.NEGATIVE_DEFINITE:
            return EssStatus.CERTIFIED
    # Grid probe of the stability condition: among near-ties of the
    # equilibrium payoff, an invader must not strictly beat p against itself.
    grid = _stability_grid(a.shape[0])
    ap_star = a @ p
    vstar = p @ ap_star
    ties = np.abs(grid @ ap_star - vstar) <= max(tol, 1e-7)
    distinct = np.max(np.abs(grid - p), axis=1) > 1e-9
    cand = grid[ties & distinct]
    if cand.size:
        gain = np.einsum("ki,ij,kj->k", cand, a, cand) - cand @ ap_star
        if np.any(gain > tol):
            return EssStatus.FALSE
    return EssStatus.SUFFICIENT_ONLY


@dataclass
class EquilibriumReport:
    """All Nash equilibria of a small matrix, found by support enumeration."""

    interior_ne: np.ndarray | None
    boundary_ne: list[tuple[np.ndarray, tuple[int, ...]]]
    ess: np.ndarray | None
    ess_status: EssStatus | None
    degenerate_supports: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def all_equilibria(self) -> list[np.ndarray]:
        pts = [p for p, _ in self.boundary_ne]
        if self.interior_ne is not None:
            pts.append(self.interior_ne)
        return pts

    def to_dict(self) -> dict:
        return {
            "interior_ne": None if self.interior_ne is None else self.interior_ne.tolist(),
            "boundary_ne": [{"point": p.tolist(), "support": list(s)}
                            for p, s in self.boundary_ne],
            "ess": None if self.ess is None else self.ess.tolist(),
            "ess_status": None if self.ess_status is None else self.ess_status.value,
            "degenerate_supports": [list(s) for s in self.degenerate_supports],
        }


def enumerate_nash(a, tol: float = MATRIX_TOL) -> EquilibriumReport:
    """Exhaustive support enumeration for n <= 5.

    For each support S, solves the linear system that equalizes payoffs on
    S and normalizes mass, keeps nonnegative solutions passing the
    equilibrium test, and records supports with rank-deficient systems.
    """
    from itertools import combinations

    a = as_payoff_matrix(a)
    n = a.shape[0]
    if n > 5:
        raise TooLarge("support enumeration is limited to n <= 5")
    found: list[tuple[np.ndarray, tuple[int, ...]]] = []
    degenerate: list[tuple[int, ...]] = []
    for size in range(1, n + 1):
        for support in combinations(range(n), size):
            idx = list(support)
            # Unknowns: p on the support plus the common payoff w.
            m = np.zeros((size + 1, size + 1))
            m[:size, :size] = a[np.ix_(idx, idx)]
            m[:size, size] = -1.0
            m[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            if np.linalg.matrix_rank(m, tol=1e-10) < size + 1:
                degenerate.append(support)
                continue
            sol = np.linalg.solve(m, rhs)
            p_s = sol[:size]
            if np.any(p_s < -1e-12):
                continue
            p = np.zeros(n)
            p[idx] = np.clip(p_s, 0.0, None)
            p /= p.sum()
            if not is_nash(a, p, tol):
                continue
            if any(np.max(np.abs(p - q)) <= 1e-8 for q, _ in found):
                continue
            found.append((p, support))
    interior = None
    boundary = []
    for p, support in found:
        if len(support) == n and np.all(p > tol):
            interior = p
        else:
            boundary.append((p, support))
    ess_point, ess_status = None, None
    for p, _ in found:
        status = is_ess(a, p, tol)
        if status is not EssStatus.FALSE:
            ess_point, ess_status = p, status
            break
    return EquilibriumReport(interior, boundary, ess_point, ess_status, degenerate)


@dataclass(frozen=True)
class ProbeResult:
    monotone_on_samples: bool
    violation: tuple[np.ndarray, np.ndarray] | None
    kind: str | None  # "pairwise" or "infinitesimal"

    def to_dict(self) -> dict:
        return {
            "monotone_on_samples": self.monotone_on_samples,
            "violation": None if self.violation is None
            else [v.tolist() for v in self.violation],
            "kind": self.kind,
        }


def monotonicity_probe(a, samples: int = 10_000, rng_seed: int = 0,
                       tol: float = 1e-12) -> ProbeResult:
    """Randomized search for a monotonicity violation of the mapped payoff field.

    Draws chart points x, y ~ N(0, 2^2) and checks
    (A sfm(psi^T x) - A sfm(psi^T y)) . psi^T (x - y) <= tol, plus the
    infinitesimal form h . A g^{-1}(p) h <= tol on sampled (p, h).  Absence
    of a violation over the sample budget is evidence, not proof.
    """
    a = as_payoff_matrix(a)
    n = a.shape[0]
    psi = ag.contrast_matrix(n)
    rng = make_rng(rng_seed)
    batch = 512
    done = 0
    while done < samples:
        k = min(batch, samples - done)
        x = 2.0 * rng.standard_normal((k, n - 1))
        y = 2.0 * rng.standard_normal((k, n - 1))
        dsf = (ag.sfm(x @ psi) - ag.sfm(y @ psi)) @ a.T
        gap = np.einsum("ki,ki->k", dsf, (x - y) @ psi)
        bad = np.flatnonzero(gap > tol)
        if bad.size:
            j = int(bad[0])
            return ProbeResult(False, (x[j], y[j]), "pairwise")
        p = ag.ilr_inv(2.0 * rng.standard_normal((k, n - 1)))
        h = rng.standard_normal((k, n - 1)) @ psi
        gh = np.einsum("kij,kj->ki", ag.shahshahani_inv(p), h)
        quad = np.einsum("ki,ij,kj->k", h, a, gh)
        bad = np.flatnonzero(quad > tol)
        if bad.size:
            j = int(bad[0])
            return ProbeResult(False, (p[j], h[j]), "infinitesimal")
        done += k
    return ProbeResult(True, None, None)
