"""Sensor placements, displacement accounting and the coverage & interference
predicate on the unit interval and the unit square.

A sensor with sensing radius ``r`` covers ``[y - r, y + r]`` on the line and the
axis-aligned square of half-side ``r`` centred on it in the plane.  A placement
satisfies the (r, s) coverage & interference requirement when the active
sensors cover the whole unit cube and every pair of active sensors is at
Euclidean distance at least ``s``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

TOL = 1e-12


def _frozen(arr, dtype=float):
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _check_unit(points: np.ndarray, what: str) -> None:
    if points.size and (points.min() < -TOL or points.max() > 1 + TOL):
        raise ValueError(f"{what} has positions outside the unit cube")
    if not np.all(np.isfinite(points)):
        raise ValueError(f"{what} has non-finite positions")


@dataclass(frozen=True)
class Placement1D:
    """Sensors on [0, 1]: sorted initial positions, current positions, activity flags."""

    initial: np.ndarray
    current: np.ndarray
    active: np.ndarray

    def __post_init__(self):
        initial = _frozen(self.initial)
        current = _frozen(self.current)
        active = _frozen(self.active, dtype=bool)
        if initial.ndim != 1 or initial.size == 0:
            raise ValueError("a 1D placement needs at least one sensor")
        if current.shape != initial.shape or active.shape != initial.shape:
            raise ValueError("initial, current and active must have equal length")
        _check_unit(initial, "initial")
        _check_unit(current, "current")
        if np.any(np.diff(initial) < 0):
            raise ValueError("initial positions must be non-decreasing")
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "current", current)
        object.__setattr__(self, "active", active)

    @property
    def n(self) -> int:
        return self.initial.size

    @classmethod
    def from_positions(cls, positions) -> "Placement1D":
        """Fresh placement: sorts ``positions``, all sensors active and unmoved."""
        xs = np.sort(np.asarray(positions, dtype=float))
        return cls(xs, xs, np.ones(xs.size, dtype=bool))


@dataclass(frozen=True)
class Placement2D:
    """Sensors on [0, 1]^2 as (n, 2) arrays of points."""

    initial: np.ndarray
    current: np.ndarray
    active: np.ndarray

    def __post_init__(self):
        initial = _frozen(self.initial).reshape(-1, 2)
        current = _frozen(self.current).reshape(-1, 2)
        active = _frozen(self.active, dtype=bool)
        if initial.shape[0] == 0:
            raise ValueError("a 2D placement needs at least one sensor")
        if current.shape != initial.shape or active.shape != (initial.shape[0],):
            raise ValueError("initial, current and active must have equal length")
        _check_unit(initial, "initial")
        _check_unit(current, "current")
        for name, value in (("initial", initial), ("current", current), ("active", active)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self.initial.shape[0]

    @classmethod
    def from_points(cls, points) -> "Placement2D":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return cls(pts, pts, np.ones(pts.shape[0], dtype=bool))


@dataclass(frozen=True)
class DisplacementReport:
    """Per-sensor net distances ``d_i`` and the a-total cost ``sum d_i**a``.

    ``per_sensor_phasewise`` holds the path length summed over the algorithm's
    phases (diagnostic only); it is never smaller than the net distance.
    """

    per_sensor: np.ndarray
    a: float
    total: float
    deactivated_count: int = 0
    per_sensor_phasewise: Optional[np.ndarray] = None
    total_phasewise: Optional[float] = None

    @property
    def n(self) -> int:
        return self.per_sensor.size


@dataclass(frozen=True)
class CandIParams:
    """Dimension ``m``, sensing radius ``r`` (half-side of the square when m=2)
    and interference distance ``s``."""

    m: int
    r: float
    s: float

    def __post_init__(self):
        if self.m not in (1, 2):
            raise ValueError("only m = 1 and m = 2 are supported")
        if not self.r > 0:
            raise ValueError("sensing radius must be positive")
        if not self.s >= 0:
            raise ValueError("interference distance must be non-negative")


@dataclass(frozen=True)
class CIResult:
    """Outcome of a coverage & interference check.

    ``clause`` is ``None`` on success, otherwise ``"coverage"`` or
    ``"interference"``; ``witness`` is an uncovered point or the offending
    pair of sensor indices.
    """

    ok: bool
    clause: Optional[str] = None
    witness: object = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _interval_cover_gap(lo: np.ndarray, hi: np.ndarray, tol: float = TOL) -> Optional[float]:
    """Return a point of [0, 1] not covered by the closed intervals, or None."""
    if lo.size == 0:
        return 0.5
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    if lo[0] > tol:
        return 0.5 * min(lo[0], 1.0)
    reach = np.maximum.accumulate(hi)
    gaps = np.nonzero(lo[1:] > reach[:-1] + tol)[0]
    for k in gaps:
        if reach[k] < 1 - tol:
            return 0.5 * (reach[k] + min(lo[k + 1], 1.0))
    if reach[-1] < 1 - tol:
        return 0.5 * (reach[-1] + 1.0)
    return None


def verify_ci_1d(p: Placement1D, params: CandIParams) -> CIResult:
    if params.m != 1:
        raise ValueError("verify_ci_1d needs m = 1")
    idx = np.nonzero(p.active)[0]
    ys = p.current[idx]
    gap = _interval_cover_gap(ys - params.r, ys + params.r)
    if gap is not None:
        return CIResult(False, "coverage", gap, f"point {gap:.6g} is not covered")
    if idx.size > 1:
        order = np.argsort(ys, kind="stable")
        diffs = np.diff(ys[order])
        bad = np.nonzero(diffs < params.s - TOL)[0]
        if bad.size:
            k = bad[0]
            i, j = int(idx[order[k]]), int(idx[order[k + 1]])
            return CIResult(
                False, "interference", (i, j),
                f"sensors {i} and {j} are {diffs[k]:.6g} apart (< {params.s:.6g})",
            )
    return CIResult(True)


def _square_cover_gap(pts: np.ndarray, r: float) -> Optional[tuple]:
    if pts.shape[0] == 0:
        return (0.5, 0.5)
    ylo = np.clip(pts[:, 1] - r, 0.0, 1.0)
    yhi = np.clip(pts[:, 1] + r, 0.0, 1.0)
    cuts = np.unique(np.concatenate(([0.0, 1.0], ylo, yhi)))
    keep = np.concatenate(([True], np.diff(cuts) > TOL))
    cuts = cuts[keep]
    if cuts[-1] < 1.0:
        cuts[-1] = 1.0
    xlo, xhi = pts[:, 0] - r, pts[:, 0] + r
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        spans = (ylo <= lo + TOL) & (yhi >= hi - TOL)
        gap = _interval_cover_gap(xlo[spans], xhi[spans])
        if gap is not None:
            return (gap, 0.5 * (lo + hi))
    return None


def verify_ci_2d(p: Placement2D, params: CandIParams) -> CIResult:
    """Exact sweep over horizontal strips bounded by the squares' y-extents."""
    if params.m != 2:
        raise ValueError("verify_ci_2d needs m = 2")
    idx = np.nonzero(p.active)[0]
    pts = p.current[idx]
    gap = _square_cover_gap(pts, params.r)
    if gap is not None:
        return CIResult(False, "coverage", gap, f"point ({gap[0]:.6g}, {gap[1]:.6g}) is not covered")
    if idx.size > 1 and params.s > 0:
        dist, nbr = cKDTree(pts).query(pts, k=2)
        k = int(np.argmin(dist[:, 1]))
        if dist[k, 1] < params.s - TOL:
            i, j = sorted((int(idx[k]), int(idx[nbr[k, 1]])))
            return CIResult(
                False, "interference", (i, j),
                f"sensors {i} and {j} are {dist[k, 1]:.6g} apart (< {params.s:.6g})",
            )
    return CIResult(True)


def displacement_report(initial, final, active, a: float, phasewise=None) -> DisplacementReport:
    """a-total displacement of moving each sensor from ``initial`` to ``final``.

    Deactivated sensors keep whatever movement they already made.  ``phasewise``
    optionally gives per-sensor path lengths summed over algorithm phases.
    """
    if not a > 0:
        raise ValueError("exponent a must be positive")
    initial = np.asarray(initial, dtype=float)
    final = np.asarray(final, dtype=float)
    if initial.shape != final.shape:
        raise ValueError("initial and final must have the same shape")
    active = np.asarray(active, dtype=bool)
    diff = final - initial
    d = np.abs(diff) if diff.ndim == 1 else np.sqrt(np.sum(diff * diff, axis=1))
    if active.shape != d.shape:
        raise ValueError("active must have one flag per sensor")
    total = float(np.sum(d ** a))
    path = total_path = None
    if phasewise is not None:
        path = _frozen(np.maximum(np.asarray(phasewise, dtype=float), d))
        total_path = float(np.sum(path ** a))
    return DisplacementReport(
        per_sensor=_frozen(d),
        a=float(a),
        total=total,
        deactivated_count=int(np.count_nonzero(~active)),
        per_sensor_phasewise=path,
        total_phasewise=total_path,
    )
