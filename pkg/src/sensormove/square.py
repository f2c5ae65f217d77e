"""Sensor reallocation on the unit square.

CV2 snaps ``q = floor(sqrt(n))`` rows of ``q`` sensors onto the row ordinates
``(j - 1/2) / q`` and then runs CV1 along each row.  The grid anchors and the
exact matching cost against them serve as the reference for the optimal
2D transport cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import DisplacementReport, Placement1D, Placement2D, displacement_report
from .line import CV1Params, cv1_algorithm
from .matching import CostMatrix, hungarian


@dataclass(frozen=True)
class GridAnchors:
    q: int
    points: np.ndarray


def grid_anchors(q: int) -> GridAnchors:
    """The q x q points ``(k/q - 1/(2q), l/q - 1/(2q))``, k-major order."""
    if q < 1:
        raise ValueError("q must be at least 1")
    c = (np.arange(1, q + 1) - 0.5) / q
    kk, ll = np.meshgrid(c, c, indexing="ij")
    pts = np.column_stack([kk.ravel(), ll.ravel()])
    pts.setflags(write=False)
    return GridAnchors(q, pts)


@dataclass(frozen=True)
class CV2Params:
    r2: float
    s: float
    a: float = 1.0

    def __post_init__(self):
        if not self.r2 > 0 or self.s < 0 or not self.a > 0:
            raise ValueError("need r2 > 0, s >= 0 and a > 0")

    @classmethod
    def from_multiples(cls, n: int, r_2q: float, s_q: float, a: float) -> "CV2Params":
        """Parameters given as ``2 * q * r2`` and ``s * q`` with ``q = floor(sqrt(n))``."""
        q = math.isqrt(n)
        return cls(r_2q / (2 * q), s_q / q, a)

    def epsilon(self, n: int) -> float:
        return 2 * math.isqrt(n) * self.r2 - 1

    def validate(self, n: int) -> None:
        q = math.isqrt(n)
        if not self.epsilon(n) > 0:
            raise ValueError(f"square sensing radius {self.r2:g} does not exceed 1/(2q) for q={q}")
        if not self.s * q < 1:
            raise ValueError(f"interference distance {self.s:g} is not below 1/q for q={q}")

    def row_params(self) -> CV1Params:
        return CV1Params(self.r2, self.s, self.a)


def cv2_algorithm(
    p: Placement2D, params: CV2Params, rng: Optional[np.random.Generator] = None
) -> tuple[Placement2D, DisplacementReport]:
    """Run CV2(n, r2, s).

    ``rng`` picks which ``q*q`` sensors take part; without it the first
    ``q*q`` by index are used, which has the same law for i.i.d. deployments.
    The remaining sensors are deactivated where they stand.
    """
    n = p.n
    params.validate(n)
    q = math.isqrt(n)
    if rng is not None:
        chosen = np.sort(rng.choice(n, size=q * q, replace=False))
    else:
        chosen = np.arange(q * q)
    start = np.asarray(p.current)
    final = start.copy()
    active = np.zeros(n, dtype=bool)
    path = np.sqrt(np.sum((start - p.initial) ** 2, axis=1))

    cx, cy = start[chosen, 0], start[chosen, 1]
    by_y = chosen[np.lexsort((chosen, cx, cy))]
    row_params = params.row_params()
    for j in range(q):
        ids = by_y[j * q:(j + 1) * q]
        y_row = (j + 0.5) / q
        path[ids] += np.abs(start[ids, 1] - y_row)
        ids = ids[np.lexsort((ids, start[ids, 0]))]
        row = Placement1D.from_positions(start[ids, 0])
        moved, row_report, _ = cv1_algorithm(row, row_params)
        final[ids, 0] = moved.current
        final[ids, 1] = y_row
        active[ids] = moved.active
        path[ids] += row_report.per_sensor_phasewise

    report = displacement_report(p.initial, final, active, params.a, phasewise=path)
    return Placement2D(p.initial, final, active), report


def anchor_matching_cost_2d(p: Placement2D, anchors: GridAnchors, a: float) -> float:
    """Minimum over bijections of ``sum d(X_i, Z_pi(i))**a`` against the grid."""
    if p.n != anchors.q ** 2:
        raise ValueError("need exactly q*q sensors")
    _, cost = hungarian(CostMatrix.from_points(p.current, anchors.points, a))
    return cost
