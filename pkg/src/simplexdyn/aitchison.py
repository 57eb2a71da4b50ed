"""Vector-space calculus on the open probability simplex.

The open simplex carries a Hilbert-space structure in which perturbation
(componentwise product followed by normalization) is the addition,
powering (componentwise powers) is the scalar multiplication, and the
log-ratio inner product

    inner(p, q) = (1/2n) * sum_ij ln(p_i/p_j) * ln(q_i/q_j)

is the scalar product.  The centered log-ratio transform ``clr`` maps the
simplex isometrically onto the zero-sum hyperplane of R^n; composing with a
contrast matrix gives the isometric log-ratio chart ``ilr`` onto R^(n-1),
where all integration in this package happens.  The softmax ``sfm`` inverts
``clr``.

All functions accept batches: compositions are stored along the last axis,
so arrays of shape ``(..., n)`` work throughout.
"""

from functools import lru_cache

import numpy as np

from .errors import (
    BadDimension,
    BoundaryProximity,
    DimensionMismatch,
    NonPositiveEntry,
)

# Below this, logs are numerically meaningless; fail loudly instead.
MIN_ENTRY = 1e-300
SUM_TOL = 1e-12


def as_composition(values, n: int | None = None) -> np.ndarray:
    """Validate ``values`` as a point of the open simplex.

    Entries must be strictly positive and sum to 1 within ``1e-12`` per
    composition; the result is renormalized (divided by its sum) so that
    long simulations stay on the constraint manifold exactly.  Raises
    ``NonPositiveEntry`` or ``DimensionMismatch`` otherwise.
    """
    p = np.asarray(values, dtype=float)
    if p.shape[-1] < 2:
        raise BadDimension(f"need at least 2 components, got {p.shape[-1]}")
    if n is not None and p.shape[-1] != n:
        raise DimensionMismatch(f"expected {n} components, got {p.shape[-1]}")
    if not np.all(np.isfinite(p)) or np.any(p <= 0.0):
        raise NonPositiveEntry("composition entries must be finite and > 0")
    sums = p.sum(axis=-1, keepdims=True)
    if np.any(np.abs(sums - 1.0) > SUM_TOL):
        worst = float(np.max(np.abs(sums - 1.0)))
        raise NonPositiveEntry(f"entries must sum to 1 (off by {worst:.3e})")
    return p / sums


def _check_positive(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0.0):
        raise NonPositiveEntry("entries must be finite and > 0")
    return x


def _check_logsafe(p: np.ndarray):
    if np.any(p < MIN_ENTRY):
        raise BoundaryProximity("entry below 1e-300; too close to the boundary")


def _same_n(p: np.ndarray, q: np.ndarray):
    if p.shape[-1] != q.shape[-1]:
        raise DimensionMismatch(f"{p.shape[-1]} vs {q.shape[-1]} components")


def closure(values) -> np.ndarray:
    """Normalize positive values to sum 1 along the last axis."""
    x = _check_positive(values)
    return x / x.sum(axis=-1, keepdims=True)


def barycenter(n: int) -> np.ndarray:
    """The neutral element (1/n, ..., 1/n)."""
    if n < 2:
        raise BadDimension("need n >= 2")
    return np.full(n, 1.0 / n)


def perturb(p, q) -> np.ndarray:
    """Group addition: closure of the componentwise product."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    _same_n(p, q)
    return closure(p * q)


def power(alpha, p) -> np.ndarray:
    """Scalar multiplication: closure of componentwise powers.

    Computed as sfm(alpha * log p) to avoid overflow for large ``alpha``.
    ``alpha`` may be a scalar or an array broadcasting against the batch.
    """
    p = _check_positive(p)
    _check_logsafe(p)
    a = np.asarray(alpha, dtype=float)
    if a.ndim:
        a = a[..., None]
    return sfm(a * np.log(p))


def inverse(p) -> np.ndarray:
    """Group inverse: closure of componentwise reciprocals."""
    return power(-1.0, p)


def ominus(p, q) -> np.ndarray:
    """Group subtraction: perturb(p, inverse(q))."""
    p, q = np.asarray(p, float), np.asarray(q, float)
    _same_n(p, q)
    return perturb(p, inverse(q))


def clr(p) -> np.ndarray:
    """Centered log-ratio transform: ln(p_i / geometric mean); zero-sum."""
    p = _check_positive(p)
    _check_logsafe(p)
    logs = np.log(p)
    return logs - logs.mean(axis=-1, keepdims=True)


def sfm(x) -> np.ndarray:
    """Softmax, the inverse of clr.  Overflow-safe via max subtraction."""
    x = np.asarray(x, dtype=float)
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def inner(p, q) -> float | np.ndarray:
    """Log-ratio inner product (1/2n) sum_ij ln(p_i/p_j) ln(q_i/q_j)."""
    p, q = _check_positive(p), _check_positive(q)
    _same_n(p, q)
    _check_logsafe(p)
    _check_logsafe(q)
    n = p.shape[-1]
    lp, lq = np.log(p), np.log(q)
    dp = lp[..., :, None] - lp[..., None, :]
    dq = lq[..., :, None] - lq[..., None, :]
    out = (dp * dq).sum(axis=(-2, -1)) / (2.0 * n)
    return float(out) if out.ndim == 0 else out


def norm(p) -> float | np.ndarray:
    """Log-ratio norm sqrt(inner(p, p))."""
    val = inner(p, p)
    return np.sqrt(np.maximum(val, 0.0))


def dist(p, q) -> float | np.ndarray:
    """Log-ratio distance: sqrt((1/2n) sum_ij (ln(p_i/p_j) - ln(q_i/q_j))^2).

    Dominates the Euclidean distance: dist(p, q) >= ||p - q||.
    """
    p, q = _check_positive(p), _check_positive(q)
    _same_n(p, q)
    _check_logsafe(p)
    _check_logsafe(q)
    n = p.shape[-1]
    d = np.log(p) - np.log(q)
    diff = d[..., :, None] - d[..., None, :]
    out = np.sqrt((diff ** 2).sum(axis=(-2, -1)) / (2.0 * n))
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=32)
def contrast_matrix(n: int) -> np.ndarray:
    """Helmert-style contrast matrix of shape (n-1, n).

    Row k is (1, ..., 1, -k, 0, ..., 0) / sqrt(k (k+1)) with k leading ones.
    Rows are the clr images of an orthonormal basis of the simplex and satisfy
    psi @ psi.T = id_(n-1) and psi.T @ psi = id_n - (1/n) ones.
    """
    if n < 2:
        raise BadDimension("need n >= 2")
    psi = np.zeros((n - 1, n))
    for k in range(1, n):
        psi[k - 1, :k] = 1.0
        psi[k - 1, k] = -float(k)
        psi[k - 1] /= np.sqrt(k * (k + 1.0))
    psi.flags.writeable = False
    return psi


def ilr(p) -> np.ndarray:
    """Isometric log-ratio chart: contrast_matrix(n) @ clr(p)."""
    c = clr(p)
    psi = contrast_matrix(c.shape[-1])
    return c @ psi.T


def ilr_inv(x) -> np.ndarray:
    """Inverse chart: sfm(psi.T @ x)."""
    x = np.asarray(x, dtype=float)
    psi = contrast_matrix(x.shape[-1] + 1)
    return sfm(x @ psi)


def shahshahani_inv(p) -> np.ndarray:
    """Inverse Fisher/Shahshahani metric tensor, entries p_i (d_ij - p_j).

    Symmetric, positive semidefinite, rows sum to zero; its image is the
    zero-sum hyperplane.  Batched input gives shape (..., n, n).
    """
    p = np.asarray(p, dtype=float)
    outer = p[..., :, None] * p[..., None, :]
    diag = np.zeros_like(outer)
    idx = np.arange(p.shape[-1])
    diag[..., idx, idx] = p
    return diag - outer


def sfm_jacobian(x) -> np.ndarray:
    """Jacobian of the softmax: diag(sfm(x)) - sfm(x) outer sfm(x)."""
    return shahshahani_inv(sfm(x))


def shahshahani_gradient(euclid_grad, p) -> np.ndarray:
    """Shahshahani gradient g^{-1}(p) @ euclid_grad; lies in the zero-sum plane."""
    g, p = np.asarray(euclid_grad, float), np.asarray(p, float)
    _same_n(g, p)
    pg = p * g
    return pg - p * pg.sum(axis=-1, keepdims=True)


def aitchison_gradient(euclid_grad, p) -> np.ndarray:
    """Simplex-valued gradient sfm(g^{-1}(p) @ euclid_grad).

    ``euclid_grad`` is the ambient Euclidean gradient of a scalar field at
    ``p``; the returned composition represents the steepest-ascent direction
    in the log-ratio geometry.
    """
    return sfm(shahshahani_gradient(euclid_grad, p))


def aitchison_log_density(p) -> float | np.ndarray:
    """Log density of the group-invariant reference measure.

    In the chart of the first n-1 coordinates the measure has density
    (prod_i p_i)^(-1), so the log density is -sum_i ln p_i.  Blows up
    toward the boundary.
    """
    p = _check_positive(p)
    _check_logsafe(p)
    out = -np.log(p).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def ito_corrector(p) -> np.ndarray:
    """Drift b_i(p) = p_i (||p||^2 - p_i) = -(g^{-1}(p) p)_i.

    This is the Ito-form drift of the driftless unit-noise diffusion written
    in simplex coordinates; it equals half the chart Laplacian of ilr_inv.
    Used as a cross-check evaluator, never as an integrator.
    """
    p = np.asarray(p, dtype=float)
    return p * ((p ** 2).sum(axis=-1, keepdims=True) - p)
