"""Sensor reallocation on the unit interval.

Three procedures:

* ``move_to_anchors_1d``: the i-th sensor in sorted order goes to the
  equidistant anchor ``(i - 1/2) / n``.
* ``mv_algorithm``: the gap-repair sweep MV(n, rho, s) that makes every
  consecutive gap lie in ``[s, rho]`` and pulls the leftmost sensor within
  ``rho / 2`` of the origin.
* ``cv1_algorithm``: CV1(n, r1, s), which runs MV and then fixes the right end
  so that the (r1, s) coverage & interference requirement holds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .beta import gamma_fn
from .geometry import TOL, CIResult, DisplacementReport, Placement1D, displacement_report


@dataclass(frozen=True)
class MVParams:
    rho: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and math.isfinite(self.s)):
            raise ValueError("rho and s must be finite")
        if not self.rho > 0 or self.s < 0:
            raise ValueError("need rho > 0 and s >= 0")
        if not self.s < self.rho:
            raise ValueError("need s < rho")

    @classmethod
    def from_multiples(cls, n: int, rho_n: float, s_n: float) -> "MVParams":
        """Parameters given as ``rho * n`` and ``s * n``."""
        return cls(rho_n / n, s_n / n)


@dataclass(frozen=True)
class CV1Params:
    r1: float
    s: float
    a: float = 1.0

    def __post_init__(self):
        if not self.r1 > 0 or self.s < 0 or not self.a > 0:
            raise ValueError("need r1 > 0, s >= 0 and a > 0")

    @classmethod
    def from_multiples(cls, n: int, r_2n: float, s_n: float, a: float) -> "CV1Params":
        """Parameters given as ``2 * n * r1`` and ``s * n``."""
        return cls(r_2n / (2 * n), s_n / n, a)

    def epsilon(self, n: int) -> float:
        return 2 * n * self.r1 - 1

    def validate(self, n: int) -> None:
        if not self.epsilon(n) > 0:
            raise ValueError(f"sensing radius {self.r1:g} does not exceed 1/(2n) for n={n}")
        if not self.s * n < 1:
            raise ValueError(f"interference distance {self.s:g} is not below 1/n for n={n}")

    def mv_params(self, n: int) -> MVParams:
        return MVParams((1 + self.epsilon(n) / 2) / n, self.s)

    def case_b_threshold(self, n: int) -> float:
        """Y_n at or below this value triggers the full re-spread (case B)."""
        return 1 - 2 * n ** (-self.a / (self.a + 1))


def anchors_1d(n: int) -> np.ndarray:
    return (np.arange(1, n + 1) - 0.5) / n


def _require_sorted_active(p: Placement1D) -> None:
    if np.any(np.diff(p.current) < 0):
        raise ValueError("current positions must be sorted")
    if not np.all(p.active):
        raise ValueError("all sensors must be active")


def move_to_anchors_1d(p: Placement1D, a: float) -> tuple[Placement1D, DisplacementReport]:
    _require_sorted_active(p)
    target = anchors_1d(p.n)
    path = np.abs(p.current - p.initial) + np.abs(target - p.current)
    report = displacement_report(p.initial, target, p.active, a, phasewise=path)
    return Placement1D(p.initial, target, p.active), report


def anchor_cost_leading_term(a: float, n: int) -> float:
    """Leading term ``Gamma(a/2 + 1) / (2**(a/2) (1 + a)) * n**(1 - a/2)`` of
    the expected a-total anchor displacement."""
    if not a > 0 or n < 1:
        raise ValueError("need a > 0 and n >= 1")
    return gamma_fn(a / 2 + 1) / (2 ** (a / 2) * (1 + a)) * n ** (1 - a / 2)


@njit(cache=True)
def _mv_sweep(x, rho, s):
    n = x.shape[0]
    y = np.empty(n)
    prev = 0.0
    for i in range(n):
        gap = x[i] - prev
        if gap < s:
            y[i] = min(s + prev, 1.0)
        elif gap > rho:
            y[i] = rho + prev
        else:
            y[i] = x[i]
        prev = y[i]
    return y


def _pile_deactivation(y: np.ndarray, s: float) -> np.ndarray:
    """Active flags after the sweep: sensors stacked at 1 keep at most one
    member, and none when it would sit closer than ``s`` to its neighbour."""
    n = y.size
    active = np.ones(n, dtype=bool)
    l0 = n
    while l0 > 0 and y[l0 - 1] >= 1.0:
        l0 -= 1
    if l0 < n:
        left = y[l0 - 1] if l0 > 0 else 0.0
        keep = l0 + 1 if 1.0 - left >= s - TOL else l0
        active[keep:] = False
    return active


def mv_algorithm(p: Placement1D, params: MVParams, a: float = 1.0) -> tuple[Placement1D, DisplacementReport]:
    """Run MV(n, rho, s) on the sorted current positions of ``p``.

    The pile-up rule at position 1 is applied after the first sweep; the final
    left shift moves every sensor, deactivated ones included.
    """
    _require_sorted_active(p)
    x = np.ascontiguousarray(p.current, dtype=float)
    y = _mv_sweep(x, float(params.rho), float(params.s))
    active = _pile_deactivation(y, params.s)
    path = np.abs(x - p.initial) + np.abs(y - x)
    if y[0] > params.rho / 2:
        z = y[0] - params.rho / 2
        y = y - z
        path = path + z
    y = np.clip(y, 0.0, 1.0)
    report = displacement_report(p.initial, y, active, a, phasewise=path)
    return Placement1D(p.initial, y, active), report


def _respread_right_end(y: np.ndarray, r1: float) -> None:
    """Case C: move the last sensor to ``1 - r1`` and pack predecessors at
    spacing ``2 r1`` while their gap to the right neighbour exceeds ``2 r1``."""
    k = y.size
    y[k - 1] = 1 - r1
    i = k - 2
    while i >= 0 and y[i + 1] - y[i] > 2 * r1:
        y[i] = 1 - r1 - (k - 1 - i) * 2 * r1
        i -= 1


def cv1_algorithm(p: Placement1D, params: CV1Params) -> tuple[Placement1D, DisplacementReport, str]:
    """Run CV1(n, r1, s); returns the placement, its report and the case taken.

    Cases are tried in the order A, B, C and the first match wins.  ``Y_n``
    is the rightmost sensor still active after MV.
    """
    n = p.n
    params.validate(n)
    mid, mv_report = mv_algorithm(p, params.mv_params(n), params.a)
    y = np.array(mid.current)
    active = np.array(mid.active)
    idx = np.nonzero(active)[0]
    last = y[idx[-1]]
    if last >= 1 - params.r1:
        case = "A"
    elif last <= params.case_b_threshold(n):
        case = "B"
        y = anchors_1d(n)
        active[:] = True
    else:
        case = "C"
        ya = y[idx]
        _respread_right_end(ya, params.r1)
        y[idx] = ya
    y = np.clip(y, 0.0, 1.0)
    path = mv_report.per_sensor_phasewise + np.abs(y - mid.current)
    report = displacement_report(p.initial, y, active, params.a, phasewise=path)
    return Placement1D(p.initial, y, active), report, case


def verify_mv_properties(p: Placement1D, params: MVParams) -> CIResult:
    """Check the two guarantees of MV on the active sensors: consecutive gaps
    in ``[s, rho]`` and the leftmost sensor within ``rho / 2`` of the origin."""
    idx = np.nonzero(p.active)[0]
    ys = p.current[idx]
    order = np.argsort(ys, kind="stable")
    ys, idx = ys[order], idx[order]
    if ys[0] > params.rho / 2 + TOL:
        return CIResult(False, "leftmost", int(idx[0]), f"leftmost sensor at {ys[0]:.6g} > rho/2")
    gaps = np.diff(ys)
    bad = np.nonzero((gaps < params.s - TOL) | (gaps > params.rho + TOL))[0]
    if bad.size:
        k = bad[0]
        pair = (int(idx[k]), int(idx[k + 1]))
        return CIResult(False, "spacing", pair, f"gap {gaps[k]:.6g} outside [s, rho]")
    return CIResult(True)
