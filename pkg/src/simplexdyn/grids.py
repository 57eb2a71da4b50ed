"""Deterministic lattices on the closed and open simplex."""

import itertools

import numpy as np


def lattice(n: int, resolution: int, interior_only: bool = False) -> np.ndarray:
    """Barycentric lattice {k/resolution : sum k = resolution} as rows.

    With ``interior_only`` every coordinate is >= 1/resolution, which for
    n = 3 gives (g-1)(g-2)/2 points at resolution g.
    """
    lo = 1 if interior_only else 0
    points = []
    for combo in itertools.product(range(lo, resolution + 1), repeat=n - 1):
        rest = resolution - sum(combo)
        if rest >= lo:
            points.append(combo + (rest,))
    return np.array(points, dtype=float) / float(resolution)


def _count(n: int, resolution: int, interior_only: bool) -> int:
    m = resolution - n if interior_only else resolution
    if m < 0:
        return 0
    from math import comb

    return comb(m + n - 1, n - 1)


def lattice_with_target(n: int, target: int, interior_only: bool = False) -> np.ndarray:
    """Largest lattice with at most ``target`` points (at least the simplex corners)."""
    resolution = n if interior_only else 1
    while _count(n, resolution + 1, interior_only) <= target:
        resolution += 1
    return lattice(n, resolution, interior_only)


def interior_grid(n: int, target: int, eps: float = 1e-9) -> np.ndarray:
    """About ``target`` strictly interior points, nudged off the boundary.

    Boundary-lattice points are pulled toward the barycenter by ``eps`` so
    that log-based operations stay defined.
    """
    pts = lattice_with_target(n, target)
    e = np.full(n, 1.0 / n)
    return (1.0 - eps) * pts + eps * e
