"""Command-line front-end: ``sensormove <subcommand> [flags]``.

Exit codes: 0 success, 1 invalid arguments, 2 a coverage & interference
failure (the replay seed is printed).
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import beta, harness
from .geometry import CandIParams, Placement1D, Placement2D, verify_ci_1d, verify_ci_2d

EXIT_OK, EXIT_ARGS, EXIT_CI = 0, 1, 2


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _add_seed(p, required=True):
    p.add_argument("--seed", type=int, required=required, help="master seed (unsigned 64-bit); the only entropy source")


def _add_workers(p):
    p.add_argument("--workers", type=int, default=1, help="worker processes; output does not depend on this (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sensormove", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment and write CSV")
    sim.add_argument("--config", help="flat JSON file with experiment settings; flags override it")
    sim.add_argument("--experiment", choices=harness.EXPERIMENTS, help="which experiment to run")
    sim.add_argument("--n", type=int, help="a single size (shorthand for --n-grid N)")
    sim.add_argument("--n-grid", type=_int_list, help="comma-separated ascending sizes")
    sim.add_argument("--stride", type=int, help="use the grid stride, 2*stride, ..., 5000 when no sizes are given")
    sim.add_argument("--a", type=float, help="displacement exponent a > 0")
    sim.add_argument("--rho-n", type=float, help="rho * n for mv_1d (default 1.8)")
    sim.add_argument("--s-n", type=float, help="s * n, or s * q in 2D (default 0.5)")
    sim.add_argument("--r-2n", type=float, help="2 * r * n, or 2 * r * q in 2D (default 1.2)")
    sim.add_argument("--reps", type=int, help="trials per size")
    sim.add_argument("--out", help="per-trial CSV path; aggregates go to <stem>.agg.csv")
    _add_seed(sim, required=False)
    _add_workers(sim)

    rep = sub.add_parser("replicate-case2", help="batch means of the anchor cost for n = q^2")
    rep.add_argument("--a", type=float, required=True, help="displacement exponent a > 0")
    rep.add_argument("--reps", type=int, default=200, help="trials per size (default 200)")
    rep.add_argument("--batch", type=int, default=10, help="trials per batch mean (default 10)")
    rep.add_argument("--q-max", type=int, default=60, help="largest q (default 60)")
    rep.add_argument("--out", help="CSV path")
    _add_seed(rep)
    _add_workers(rep)

    fit = sub.add_parser("fit", help="log-log slope of an aggregate CSV")
    fit.add_argument("--in", dest="path", required=True, help="aggregate CSV (.agg.csv)")
    fit.add_argument("--n-min", type=int, default=1, help="ignore rows with n below this")

    orc = sub.add_parser("oracle-2d", help="exact grid matching cost in the unit square")
    orc.add_argument("--a", type=float, required=True, help="displacement exponent a > 0")
    orc.add_argument("--q-grid", type=_int_list, default=[4, 8, 12, 16, 20], help="comma-separated q values")
    orc.add_argument("--reps", type=int, default=50, help="trials per q (default 50)")
    orc.add_argument("--out", help="CSV path")
    _add_seed(orc)
    _add_workers(orc)

    vb = sub.add_parser("verify-beta", help="scan one of the beta inequalities or identities")
    vb.add_argument("--check", required=True, choices=["lemma_first", "prohorov", "series", "normalization"],
                    help="which check to scan")
    vb.add_argument("--n-max", type=int, default=10000, help="largest n scanned (default 10000)")
    vb.add_argument("--a", type=_float_list, default=None, help="comma-separated exponents")
    vb.add_argument("--samples", type=int, default=10000, help="random triples for prohorov (default 10000)")
    _add_seed(vb, required=False)

    vc = sub.add_parser("verify-ci", help="check coverage & interference of positions read from a CSV")
    vc.add_argument("--in", dest="path", required=True, help="CSV with one position per row (x, or x,y)")
    vc.add_argument("--r", type=float, required=True, help="sensing radius")
    vc.add_argument("--s", type=float, required=True, help="interference distance")
    return parser


def _simulate(args) -> int:
    data = {}
    if args.config:
        data = harness.read_config(args.config)
        if "n_grid" in data and (args.n is not None or args.n_grid is not None or args.stride is not None):
            data.pop("n_grid")
    overrides = {
        "experiment": args.experiment, "a": args.a, "rho_n": args.rho_n, "s_n": args.s_n,
        "r_2n": args.r_2n, "reps": args.reps, "master_seed": args.seed, "output": args.out,
        "stride": args.stride,
        "n_grid": [args.n] if args.n is not None else args.n_grid,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("experiment", "a", "master_seed"):
        if key not in data:
            raise _ArgError(f"missing --{'seed' if key == 'master_seed' else key} (flag or config)")
    cfg = harness.ExperimentConfig.from_mapping(data)
    res = harness.run_experiment(cfg, workers=args.workers)
    print(f"{cfg.experiment} a={cfg.a:g} reps={cfg.reps} seed={cfg.master_seed}")
    print("n,mean,std_err,centerline")
    for row in res.aggregates:
        print(f"{row.n},{row.mean:.6g},{row.std_err:.3g},{'' if row.centerline is None else f'{row.centerline:.6g}'}")
    if cfg.output:
        print(f"wrote {cfg.output} and {harness.aggregate_path(cfg.output)}")
    return EXIT_OK


def _replicate(args) -> int:
    rows = harness.replicate_case2(args.a, args.reps, args.batch, args.q_max, args.seed, args.workers)
    if args.out:
        harness.write_table(args.out, harness.CASE2_COLUMNS, rows)
        print(f"wrote {args.out}")
    last = [r for r in rows if r.n == args.q_max ** 2]
    mean = float(np.mean([r.batch_mean for r in last]))
    print(f"n={args.q_max ** 2}: mean of batch means {mean:.6g}, centerline {last[0].centerline:.6g}")
    return EXIT_OK


def _fit(args) -> int:
    res = harness.fit_scaling(args.path, args.n_min)
    print(f"slope={res.slope:.6g} intercept={res.intercept:.6g} r_squared={res.r_squared:.6g} "
          f"n_range={res.n_range[0]}..{res.n_range[1]}")
    return EXIT_OK


def _oracle(args) -> int:
    rows = harness.oracle_scaling_2d(args.a, args.q_grid, args.reps, args.seed, args.workers)
    if args.out:
        harness.write_table(args.out, harness.ORACLE_COLUMNS, rows)
    print("q,n,mean,std_err,normalized")
    for r in rows:
        print(f"{r.q},{r.n},{r.mean:.6g},{r.std_err:.3g},{r.normalized:.6g}")
    return EXIT_OK


def _verify_beta(args) -> int:
    failures = 0
    total = 0
    if args.check == "lemma_first":
        for a in args.a or [0.5, 1.0, 2.0, 4.0]:
            for n in range(2, args.n_max + 1):
                total += 1
                if not beta.verify_lemma_first(n, a):
                    failures += 1
                    print(f"FAIL n={n} a={a:g}")
    elif args.check == "prohorov":
        rng = np.random.default_rng(args.seed if args.seed is not None else 0)
        for _ in range(args.samples):
            n = int(rng.integers(1, args.n_max + 1))
            x = float(rng.uniform(0.0, 1.0))
            m1 = beta.prohorov_m1(n, x)
            if m1 < 1:
                continue
            j = int(rng.integers(0, m1))
            total += 1
            if not beta.verify_prohorov(n, j, x):
                failures += 1
                print(f"FAIL n={n} j={j} x={x!r}")
    elif args.check == "series":
        for a in args.a or [0.5, 1.0, 2.5]:
            total += 1
            if not beta.verify_series_integral_identity(a):
                failures += 1
                print(f"FAIL a={a:g}")
    else:
        for c in (1, 2, 5, 50, 500, 5000):
            for d in (1, 3, 40, 2000):
                total += 1
                err = abs(beta.beta_normalization(beta.BetaParams(c, d)) - 1)
                if not err < 1e-8:
                    failures += 1
                    print(f"FAIL c={c} d={d} err={err:.3g}")
    print(f"{args.check}: {total - failures}/{total} true")
    return EXIT_OK if failures == 0 else EXIT_CI


def _verify_ci(args) -> int:
    pts = np.loadtxt(args.path, delimiter=",", ndmin=2)
    if pts.shape[1] == 1:
        p = Placement1D.from_positions(np.sort(pts[:, 0]))
        res = verify_ci_1d(p, CandIParams(1, args.r, args.s))
    elif pts.shape[1] == 2:
        p = Placement2D.from_points(pts)
        res = verify_ci_2d(p, CandIParams(2, args.r, args.s))
    else:
        raise _ArgError("positions file must have one or two columns")
    if res.ok:
        print("coverage & interference: true")
        return EXIT_OK
    print(f"coverage & interference: false ({res.clause}: {res.message})")
    return EXIT_CI


HANDLERS = {
    "simulate": _simulate,
    "replicate-case2": _replicate,
    "fit": _fit,
    "oracle-2d": _oracle,
    "verify-beta": _verify_beta,
    "verify-ci": _verify_ci,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgError as exc:
        print(f"sensormove: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return HANDLERS[args.command](args)
    except harness.CIViolation as exc:
        print(f"sensormove: verification failed: {exc}", file=sys.stderr)
        print(f"replay seed: master_seed={exc.master_seed} stream_id={exc.stream_id}")
        return EXIT_CI
    except (_ArgError, ValueError, TypeError, OSError) as exc:
        print(f"sensormove: error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
