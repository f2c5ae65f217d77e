"""Exact minimum-cost assignment and the monotone 1D matching."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

MAX_N = 2500


@dataclass(frozen=True)
class CostMatrix:
    """Square matrix of non-negative finite costs; entry (i, j) is ``d(X_i, Z_j)**a``."""

    entries: np.ndarray

    def __post_init__(self):
        c = np.array(self.entries, dtype=float, copy=True)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
            raise ValueError("cost matrix must be square and non-empty")
        if not np.all(np.isfinite(c)):
            raise ValueError("cost matrix has non-finite entries")
        if np.any(c < 0):
            raise ValueError("cost matrix has negative entries")
        c.setflags(write=False)
        object.__setattr__(self, "entries", c)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_points(cls, xs, zs, a: float) -> "CostMatrix":
        """Costs ``|x_i - z_j|**a`` (Euclidean distance for points in the plane)."""
        xs = np.asarray(xs, dtype=float)
        zs = np.asarray(zs, dtype=float)
        if xs.ndim == 1:
            d = np.abs(xs[:, None] - zs[None, :])
        else:
            diff = xs[:, None, :] - zs[None, :, :]
            d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        return cls(d ** a)


@njit(cache=True)
def _shortest_augmenting_path(c):
    # Dual-potential Hungarian method, one augmenting path per row; O(n^3).
    n = c.shape[0]
    inf = np.inf
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    minv = np.empty(n + 1)
    used = np.empty(n + 1, dtype=np.bool_)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv[:] = inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = c[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    perm = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    return perm


def assignment_cost(c, perm) -> float:
    """Sum of ``c[i, perm[i]]`` accumulated in row order."""
    c = c.entries if isinstance(c, CostMatrix) else np.asarray(c, dtype=float)
    total = 0.0
    for i, j in enumerate(perm):
        total += float(c[i, j])
    return total


def hungarian(c) -> tuple[np.ndarray, float]:
    """Optimal assignment ``perm`` (row i -> column perm[i]) and its cost."""
    if not isinstance(c, CostMatrix):
        c = CostMatrix(c)
    if c.n > MAX_N:
        raise ValueError(f"dense assignment is limited to n <= {MAX_N}")
    perm = _shortest_augmenting_path(np.ascontiguousarray(c.entries))
    return perm, assignment_cost(c, perm)


def sorted_matching_cost_1d(xs, ys, a: float) -> float:
    """Cost of matching the i-th smallest of ``xs`` to the i-th smallest of ``ys``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1D with equal length")
    if np.any(np.diff(xs) < 0) or np.any(np.diff(ys) < 0):
        raise ValueError("xs and ys must be sorted")
    if not a > 0:
        raise ValueError("exponent a must be positive")
    return float(np.sum(np.abs(xs - ys) ** a))
