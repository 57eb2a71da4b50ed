"""Reproducible random-number streams for ensemble simulation.

Every stochastic routine takes either an integer seed or a master seed plus a
trajectory index.  Trajectory ``i`` of an ensemble always draws from the
stream ``spawn(master_seed, i)``, a splittable counter construction, so an
ensemble is bit-identical no matter how the trajectories are chunked or
distributed over workers.
"""

import numpy as np


def make_rng(seed) -> np.random.Generator:
    """Generator for a single seeded computation."""
    return np.random.default_rng(np.random.SeedSequence(seed))


def spawn(master_seed, index: int) -> np.random.Generator:
    """Independent stream for trajectory ``index`` under ``master_seed``.

    Uses ``SeedSequence(master_seed, spawn_key=(index,))``, the documented
    stable derivation, so the stream depends only on the pair of integers.
    """
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(index,))
    )
