"""Monte Carlo experiment runner, CSV output and scaling-exponent fits.

Rates are stored as dimensionless multiples (``rho * n``, ``s * n``,
``2 * r * n``) so one configuration spans a whole grid of sizes.  For the 2D
experiment the multiples refer to ``q = floor(sqrt(n))`` instead of ``n``.

Each trial draws from its own stream ``(master_seed, (n << 32) | trial)``,
and tables are assembled in ``(n, trial)`` order, so output does not depend
on the number of workers.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .beta import lemma_sum_bound
from .geometry import CandIParams, verify_ci_1d, verify_ci_2d
from .line import (
    CV1Params,
    MVParams,
    anchor_cost_leading_term,
    cv1_algorithm,
    move_to_anchors_1d,
    mv_algorithm,
    verify_mv_properties,
)
from .rng import GENERATOR_ID, SeedSpec, sample_sorted_uniform_1d, sample_uniform_2d, trial_stream_id
from .square import CV2Params, anchor_matching_cost_2d, cv2_algorithm, grid_anchors

EXPERIMENTS = ("anchors_1d", "mv_1d", "cv1_1d", "cv2_2d", "oracle_2d", "beta_lemmas")

TRIAL_COLUMNS = [
    "experiment", "n", "a", "trial", "seed_stream", "cost",
    "cost_phasewise", "ci_verified", "deactivated_count",
]
AGG_COLUMNS = ["n", "a", "reps", "mean", "std_err", "centerline"]


class CIViolation(RuntimeError):
    """A trial produced a placement that fails its coverage/spacing check."""

    def __init__(self, experiment, n, master_seed, trial, message):
        self.experiment = experiment
        self.n = n
        self.master_seed = master_seed
        self.trial = trial
        self.message = message
        self.stream_id = trial_stream_id(n, trial)
        super().__init__(
            f"{experiment} n={n} trial={trial}: {message} "
            f"(replay with master_seed={master_seed}, stream_id={self.stream_id})"
        )

    def __reduce__(self):
        return (CIViolation, (self.experiment, self.n, self.master_seed, self.trial, self.message))


def case1_grid(stride: int = 50, n_max: int = 5000) -> list[int]:
    """Sizes ``stride, 2*stride, ..., <= n_max``; stride 1 gives every size."""
    if stride < 1:
        raise ValueError("stride must be positive")
    return list(range(stride, n_max + 1, stride))


@dataclass
class ExperimentConfig:
    experiment: str
    a: float
    n_grid: Optional[list] = None
    rho_n: float = 1.8
    s_n: float = 0.5
    r_2n: float = 1.2
    reps: int = 1
    master_seed: int = 0
    output: Optional[str] = None
    n_min: int = 1
    stride: Optional[int] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.n_grid is None:
            if self.stride is None:
                raise ValueError("give n_grid or stride")
            self.n_grid = case1_grid(self.stride)
        self.n_grid = [int(n) for n in self.n_grid]
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise ValueError("n_grid must be a non-empty list of positive integers")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be strictly ascending")
        if not self.a > 0:
            raise ValueError("a must be positive")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not 0 <= self.master_seed < 1 << 64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if self.experiment == "oracle_2d":
            bad = [n for n in self.n_grid if math.isqrt(n) ** 2 != n]
            if bad:
                raise ValueError(f"oracle_2d needs perfect squares, got {bad}")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        _check_keys(data)
        missing = {"experiment", "a"} - set(data)
        if missing:
            raise ValueError(f"missing config keys: {', '.join(sorted(missing))}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_mapping(read_config(path))


def _check_keys(data: dict) -> None:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")


def read_config(path) -> dict:
    """Read a flat JSON object of ``ExperimentConfig`` fields; unknown keys are errors."""
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or any(isinstance(v, dict) for v in data.values()):
        raise ValueError("config must be a flat JSON object")
    _check_keys(data)
    return data


@dataclass
class TrialRow:
    experiment: str
    n: int
    a: float
    trial: int
    seed_stream: int
    cost: float
    cost_phasewise: float
    ci_verified: Optional[bool]
    deactivated_count: int


@dataclass
class AggregateRow:
    n: int
    a: float
    reps: int
    mean: float
    std_err: float
    centerline: Optional[float] = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list = field(default_factory=list)
    aggregates: list = field(default_factory=list)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_range: tuple


def _run_trial(exp, n, a, rho_n, s_n, r_2n, master_seed, trial) -> TrialRow:
    stream = trial_stream_id(n, trial)
    rng = SeedSpec(master_seed, stream).generator()
    verified: Optional[bool] = None
    check = None
    deact = 0
    if exp == "anchors_1d":
        p = sample_sorted_uniform_1d(n, rng)
        out, rep = move_to_anchors_1d(p, a)
        check = verify_ci_1d(out, CandIParams(1, 1 / (2 * n), 1 / n))
    elif exp == "mv_1d":
        p = sample_sorted_uniform_1d(n, rng)
        prm = MVParams.from_multiples(n, rho_n, s_n)
        out, rep = mv_algorithm(p, prm, a)
        check = verify_mv_properties(out, prm)
    elif exp == "cv1_1d":
        p = sample_sorted_uniform_1d(n, rng)
        prm = CV1Params.from_multiples(n, r_2n, s_n, a)
        out, rep, _ = cv1_algorithm(p, prm)
        check = verify_ci_1d(out, CandIParams(1, prm.r1, prm.s))
    elif exp == "cv2_2d":
        p = sample_uniform_2d(n, rng)
        prm = CV2Params.from_multiples(n, r_2n, s_n, a)
        out, rep = cv2_algorithm(p, prm, rng)
        check = verify_ci_2d(out, CandIParams(2, prm.r2, prm.s))
    elif exp == "oracle_2d":
        p = sample_uniform_2d(n, rng)
        cost = anchor_matching_cost_2d(p, grid_anchors(math.isqrt(n)), a)
        return TrialRow(exp, n, a, trial, stream, cost, cost, None, 0)
    elif exp == "beta_lemmas":
        upper = lemma_sum_bound(n, a, rho_n / n, "upper")
        lower = lemma_sum_bound(n, a, s_n / n, "lower")
        return TrialRow(exp, n, a, trial, stream, upper, lower, None, 0)
    else:
        raise ValueError(f"unknown experiment {exp!r}")
    if not check.ok:
        raise CIViolation(exp, n, master_seed, trial, check.message or check.clause)
    verified = True
    deact = rep.deactivated_count
    return TrialRow(exp, n, a, trial, stream, rep.total, rep.total_phasewise, verified, deact)


def _run_block(args) -> list:
    exp, n, a, rho_n, s_n, r_2n, master_seed, lo, hi = args
    return [_run_trial(exp, n, a, rho_n, s_n, r_2n, master_seed, t) for t in range(lo, hi)]


def _centerline(exp: str, n: int, a: float) -> Optional[float]:
    if exp == "anchors_1d":
        return anchor_cost_leading_term(a, n)
    if exp == "beta_lemmas":
        return n ** (1 - a)
    return None


def aggregate(trials: Sequence[TrialRow]) -> list:
    rows = []
    by_n: dict = {}
    for t in trials:
        by_n.setdefault((t.n, t.a, t.experiment), []).append(t.cost)
    for (n, a, exp), costs in sorted(by_n.items(), key=lambda kv: kv[0][0]):
        c = np.asarray(costs, dtype=float)
        se = float(c.std(ddof=1) / math.sqrt(c.size)) if c.size > 1 else math.nan
        rows.append(AggregateRow(n, a, c.size, float(c.mean()), se, _centerline(exp, n, a)))
    return rows


def run_experiment(cfg: ExperimentConfig, workers: int = 1, block: int = 250) -> ExperimentResult:
    """Run every trial of ``cfg`` and return per-trial rows and per-n aggregates.

    Raises ``CIViolation`` on the first trial whose output fails its check.
    """
    reps = 1 if cfg.experiment == "beta_lemmas" else cfg.reps
    tasks = []
    for n in cfg.n_grid:
        for lo in range(0, reps, block):
            tasks.append((cfg.experiment, n, cfg.a, cfg.rho_n, cfg.s_n, cfg.r_2n,
                          cfg.master_seed, lo, min(lo + block, reps)))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_run_block, tasks))
    else:
        blocks = [_run_block(t) for t in tasks]
    trials = [row for b in blocks for row in b]
    trials.sort(key=lambda r: (r.n, r.trial))
    result = ExperimentResult(cfg, trials, aggregate(trials))
    if cfg.output:
        write_result(result, cfg.output)
    return result


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def aggregate_path(path) -> Path:
    path = Path(path)
    stem = path.name[:-4] if path.name.endswith(".csv") else path.name
    return path.with_name(stem + ".agg.csv")


def write_table(path, columns: Sequence[str], rows: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            d = asdict(r) if not isinstance(r, dict) else r
            w.writerow([_fmt(d[c]) for c in columns])


def write_result(result: ExperimentResult, path) -> tuple[Path, Path]:
    """Write the per-trial CSV, the ``.agg.csv`` aggregates and a ``.meta.json`` sidecar."""
    path = Path(path)
    write_table(path, TRIAL_COLUMNS, result.trials)
    agg = aggregate_path(path)
    write_table(agg, AGG_COLUMNS, result.aggregates)
    meta = {"config": asdict(result.config), "generator": GENERATOR_ID}
    meta["config"]["output"] = str(result.config.output) if result.config.output else None
    path.with_name(path.name + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path, agg


def _parse(v: str):
    if v == "":
        return None
    if v in ("true", "false"):
        return v == "true"
    try:
        return int(v)
    except ValueError:
        return float(v)


def read_table(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: (_parse(v) if k != "experiment" else v) for k, v in row.items()}
                for row in csv.DictReader(fh)]


def read_aggregates(path) -> list[AggregateRow]:
    return [AggregateRow(**{c: row.get(c) for c in AGG_COLUMNS}) for row in read_table(path)]


def fit_line(x, y) -> tuple[float, float, float]:
    """Ordinary least squares ``y ~ slope * x + intercept`` and its R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), min(max(r2, 0.0), 1.0)


def _rows(table) -> list:
    if isinstance(table, (str, Path)):
        return read_aggregates(table)
    if isinstance(table, ExperimentResult):
        return table.aggregates
    return [AggregateRow(**{c: r.get(c) for c in AGG_COLUMNS}) if isinstance(r, dict) else r for r in table]


def fit_scaling(table, n_min: int = 1) -> FitResult:
    """Slope of ``ln(mean)`` against ``ln(n)`` over rows with ``n >= n_min``."""
    rows = [r for r in _rows(table) if r.n >= n_min]
    if len(rows) < 4:
        raise ValueError(f"need at least 4 aggregate rows with n >= {n_min}, got {len(rows)}")
    means = np.array([r.mean for r in rows], dtype=float)
    if np.any(~(means > 0)):
        raise ValueError("log-log fit needs strictly positive means")
    ns = np.array([r.n for r in rows], dtype=float)
    slope, icpt, r2 = fit_line(np.log(ns), np.log(means))
    return FitResult(slope, icpt, r2, (int(ns.min()), int(ns.max())))


def fit_log_growth(table, n_min: int = 1) -> FitResult:
    """Slope of ``mean`` against ``ln(n)``; detects logarithmic growth."""
    rows = [r for r in _rows(table) if r.n >= n_min]
    if len(rows) < 3:
        raise ValueError("need at least 3 aggregate rows")
    ns = np.array([r.n for r in rows], dtype=float)
    slope, icpt, r2 = fit_line(np.log(ns), [r.mean for r in rows])
    return FitResult(slope, icpt, r2, (int(ns.min()), int(ns.max())))


@dataclass
class Case2Row:
    n: int
    a: float
    batch: int
    batch_mean: float
    centerline: float
    batch_std_err: float


CASE2_COLUMNS = ["n", "a", "batch", "batch_mean", "centerline", "batch_std_err"]


def replicate_case2(a: float, reps: int = 200, batch: int = 10, q_max: int = 60,
                    master_seed: int = 0, workers: int = 1, q_min: int = 1) -> list[Case2Row]:
    """Anchor displacement for ``n = q^2``, ``q = q_min..q_max``: ``reps`` trials
    per size, averaged in consecutive batches of ``batch``.

    ``batch_std_err`` is the trial standard deviation at that size divided by
    ``sqrt(batch)``.
    """
    if reps % batch:
        raise ValueError("reps must be a multiple of batch")
    grid = [q * q for q in range(q_min, q_max + 1)]
    res = run_experiment(ExperimentConfig("anchors_1d", a, grid, reps=reps, master_seed=master_seed),
                         workers=workers)
    out = []
    for n in grid:
        costs = np.array([t.cost for t in res.trials if t.n == n])
        se = float(costs.std(ddof=1) / math.sqrt(batch))
        center = anchor_cost_leading_term(a, n)
        for k in range(reps // batch):
            out.append(Case2Row(n, a, k + 1, float(costs[k * batch:(k + 1) * batch].mean()), center, se))
    return out


@dataclass
class OracleRow:
    q: int
    n: int
    a: float
    reps: int
    mean: float
    std_err: float
    normalized: float


ORACLE_COLUMNS = ["q", "n", "a", "reps", "mean", "std_err", "normalized"]


def oracle_scaling_2d(a: float, q_grid: Sequence[int], reps: int, master_seed: int,
                      workers: int = 1) -> list[OracleRow]:
    """Exact matching cost of ``q^2`` uniform points to the ``q x q`` grid.

    ``normalized`` divides the mean by ``(ln n)^(a/2) * n^(1 - a/2)``; it is
    NaN at ``n = 1``.
    """
    grid = sorted(int(q) ** 2 for q in q_grid)
    res = run_experiment(ExperimentConfig("oracle_2d", a, grid, reps=reps, master_seed=master_seed),
                         workers=workers, block=max(1, min(reps, 25)))
    out = []
    for agg in res.aggregates:
        scale = math.log(agg.n) ** (a / 2) * agg.n ** (1 - a / 2)
        norm = agg.mean / scale if scale > 0 else math.nan
        out.append(OracleRow(math.isqrt(agg.n), agg.n, a, agg.reps, agg.mean, agg.std_err, norm))
    return out
