"""Per-trial random streams and uniform sensor deployments.

Every trial owns a generator derived from ``(master_seed, stream_id)`` alone,
so results do not depend on how trials are scheduled across workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Placement1D, Placement2D

GENERATOR_ID = "numpy.PCG64 via SeedSequence(entropy=master_seed, spawn_key=(stream_id,))"

_U64 = 1 << 64


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not (0 <= int(v) < _U64):
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.master_seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))


def trial_stream_id(n: int, trial: int) -> int:
    """Stream id of trial ``trial`` at size ``n``; independent of the rest of the grid."""
    if n < 0 or trial < 0 or n >= 1 << 32 or trial >= 1 << 32:
        raise ValueError("n and trial must fit in 32 bits")
    return (int(n) << 32) | int(trial)


def _as_generator(seed) -> np.random.Generator:
    if isinstance(seed, SeedSpec):
        return seed.generator()
    if isinstance(seed, np.random.Generator):
        return seed
    raise TypeError("seed must be a SeedSpec or a numpy Generator")


def sample_sorted_uniform_1d(n: int, seed) -> Placement1D:
    if n < 1:
        raise ValueError("n must be at least 1")
    xs = np.sort(_as_generator(seed).random(n))
    return Placement1D(xs, xs, np.ones(n, dtype=bool))


def sample_uniform_2d(n: int, seed) -> Placement2D:
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = _as_generator(seed).random((n, 2))
    return Placement2D(pts, pts, np.ones(n, dtype=bool))


def beta_order_statistic_sample(l: int, n: int, seed, size=None):
    """Draw(s) of the l-th smallest of n uniforms, i.e. Beta(l, n - l + 1).

    Sorts explicitly rather than sampling the Beta law, so the draw is exact
    by construction.  With ``size`` returns an array of independent draws.
    """
    if not 1 <= l <= n:
        raise ValueError("need 1 <= l <= n")
    rng = _as_generator(seed)
    if size is None:
        return float(np.sort(rng.random(n))[l - 1])
    u = rng.random((int(size), n))
    return np.partition(u, l - 1, axis=1)[:, l - 1]
