"""Command-line entry point.

    lcc plan --N 8 --K 2 --S 1 --A 1 --T 1 --deg 2
    lcc encode --N 8 --K 2 --T 1 --M 4 --p 127 --out shares/
    lcc simulate --N 8 --K 2 --S 1 --A 1 --T 1 --deg 2 --p 11 --rounds 100
    lcc sweep --max-N 12 --max-K 6 --degrees 1 2 3 --trials 20
    lcc audit-privacy --N 6 --K 2 --T 2 --p 11
    lcc regress --m 200 --d 20 --n 40 --r 10 --mode field
    lcc bench --n 40 --r 10 --runs 100

Reports are JSON on stdout (and in ``--out``/``$LCC_OUTPUT_DIR`` when given);
per-round tables are CSV.  Exit status: 0 ok, 2 infeasible parameters, 1 error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import functions
from .codec import build_matrix, encode, encode_real, build_matrix_real, make_pad, write_shares
from .errors import ConditioningWarning, InfeasibleParams, LCCError
from .field import DEFAULT_PRIME, PrimeField
from .privacy import audit_privacy
from .scheme import (
    SchemeParams,
    Variant,
    describe_region,
    feasible,
    make_eval_points,
    recovery_threshold,
    region_report,
)

OUTPUT_ENV = "LCC_OUTPUT_DIR"


def _scheme_args(p: argparse.ArgumentParser, with_faults: bool = True) -> None:
    p.add_argument("--N", type=int, required=False, help="number of workers")
    p.add_argument("--K", type=int, required=False, help="number of data blocks")
    if with_faults:
        p.add_argument("--S", type=int, default=0, help="straggler budget")
        p.add_argument("--A", type=int, default=0, help="adversary budget")
    p.add_argument("--T", type=int, default=0, help="collusion budget")
    p.add_argument("--deg", type=int, default=1, help="total degree of f")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--config", type=Path, default=None, help="JSON config; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcc", description="Lagrange coded computing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="check (S, A, T) feasibility and recovery threshold")
    _scheme_args(p)
    _common(p)

    p = sub.add_parser("encode", help="encode a dataset into per-worker share files")
    _scheme_args(p, with_faults=False)
    p.add_argument("--M", type=int, default=4, help="block length")
    p.add_argument("--p", type=int, default=DEFAULT_PRIME)
    p.add_argument("--data", type=Path, default=None, help="CSV with K rows of M integers")
    p.add_argument("--mode", choices=("field", "real"), default="field")
    _common(p)

    p = sub.add_parser("simulate", help="run coded rounds with injected faults")
    _scheme_args(p)
    p.add_argument("--p", type=int, default=DEFAULT_PRIME)
    p.add_argument("--M", type=int, default=1, help="block width per degree group")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--stragglers", type=int, default=None, help="injected stragglers (default S)")
    p.add_argument("--adversaries", type=int, default=None, help="injected adversaries (default A)")
    p.add_argument("--corruption", choices=("random", "offset", "targeted"), default="targeted")
    _delay_args(p, prob=0.0, secs=0.0)
    _common(p)

    p = sub.add_parser("sweep", help="exercise every feasible tuple on a grid")
    p.add_argument("--max-N", type=int, default=12)
    p.add_argument("--max-K", type=int, default=6)
    p.add_argument("--degrees", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--p", type=int, default=127)
    _common(p)

    p = sub.add_parser("audit-privacy", help="MDS audit and exhaustive mutual information")
    _scheme_args(p, with_faults=False)
    p.add_argument("--p", type=int, default=11)
    p.add_argument("--M", type=int, default=1)
    p.add_argument("--no-exhaustive", action="store_true", help="skip the mutual-information enumeration")
    _common(p)

    p = sub.add_parser("regress", help="coded gradient descent for least squares")
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--d", type=int, default=20)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--r", type=int, default=10)
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--mode", choices=("real", "field"), default="real")
    p.add_argument("--scale", type=int, default=2**8)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--stragglers", type=int, default=0, help="random stragglers per iteration")
    p.add_argument("--data", type=Path, default=None, help="CSV, last column is the label")
    _delay_args(p, prob=0.05, secs=0.5)
    _common(p)

    p = sub.add_parser("bench", help="simulated run-time of uncoded, repetition and Lagrange schemes")
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--r", type=int, default=10)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--m", type=int, default=80)
    p.add_argument("--d", type=int, default=10)
    _delay_args(p, prob=0.05, secs=0.5)
    _common(p)
    return parser


def _delay_args(p, prob, secs):
    p.add_argument("--delay-prob", type=float, default=prob)
    p.add_argument("--delay-secs", type=float, default=secs)
    p.add_argument("--compute-cost", type=float, default=1e-3, help="synthetic seconds per sub-matrix")
    p.add_argument("--comm-cost", type=float, default=5e-3, help="synthetic seconds per return")


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        cfg = json.loads(Path(args.config).read_text())
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(cfg) - known
        if unknown:
            parser.error(f"unknown keys in {args.config}: {', '.join(sorted(unknown))}")
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return parser, args


def _config(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
            if k not in ("config", "out")}


def _outdir(args) -> Path | None:
    if args.out is not None:
        return args.out
    env = os.environ.get(OUTPUT_ENV)
    return Path(env) if env else None


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _csv(rows) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, name: str, report: dict, rows=None) -> None:
    text = _dumps(report)
    print(text)
    out = _outdir(args)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(text + "\n")
        if rows:
            (out / f"{name}.csv").write_text(_csv(rows))


def _need(parser, args, *names):
    for n in names:
        if getattr(args, n) is None:
            parser.error(f"--{n} is required")


def _params(args, p=DEFAULT_PRIME) -> SchemeParams:
    return SchemeParams(args.N, args.K, getattr(args, "S", 0), getattr(args, "A", 0), args.T, args.deg, p)


# --------------------------------------------------------------------------


def cmd_plan(parser, args) -> int:
    _need(parser, args, "N", "K")
    N, K, S, A, T, d = args.N, args.K, args.S, args.A, args.T, args.deg
    line = describe_region(N, K, S, A, T, d)
    report = {"config": _config(args), "summary": line, "region": region_report(N, K, S, A, T, d)}
    variant = feasible(N, K, S, A, T, d)
    if variant is not Variant.INFEASIBLE and feasible(N, K, 0, 0, T, d) is not Variant.INFEASIBLE:
        report["recovery_threshold"] = recovery_threshold(N, K, d, T)
        report["decode_needs"] = (K + T - 1) * d + 2 * A + 1
    r = report["region"]
    print(line, file=sys.stderr)
    for key in ("lagrange", "uncoded_repetition"):
        x = r[key]
        print(f"  {key}: {x['formula']}: {x['expr']} = {x['lhs']} {'<=' if x['holds'] else '>'} {N}",
              file=sys.stderr)
    _emit(args, "plan", report)
    return 0 if variant is not Variant.INFEASIBLE else 2


def _read_int_csv(path) -> list[list[int]]:
    with open(path, newline="") as fh:
        return [[int(v) for v in row] for row in csv.reader(fh) if row]


def cmd_encode(parser, args) -> int:
    _need(parser, args, "N", "K")
    rng = np.random.default_rng(args.seed)
    if args.mode == "real":
        params = SchemeParams(args.N, args.K, 0, 0, 0, args.deg, args.p)
        points = make_eval_points(params, mode="real")
        X = np.loadtxt(args.data, delimiter=",", ndmin=2) if args.data else rng.standard_normal((args.K, args.M))
        shares = encode_real(X, build_matrix_real(points.betas, points.alphas))
        p, M, consumed = 0, X.shape[1], 0
    else:
        params = _params(args, args.p)
        F = params.field
        points = make_eval_points(params)
        X = _read_int_csv(args.data) if args.data else \
            [[int(v) for v in rng.integers(0, F.p, size=args.M)] for _ in range(args.K)]
        M = len(X[0])
        pad = make_pad(F, args.T, M, args.seed)
        if params.variant is Variant.UNCODED_REPETITION:
            from .codec import encode_repetition
            shares = encode_repetition(X, points)
        else:
            shares = encode(X, pad, build_matrix(F, points))
        p, consumed = F.p, pad.consumed
    out = _outdir(args)
    files = []
    if out is not None:
        files = [str(f.name) for f in write_shares(out, shares, points.alphas, p)]
    report = {"config": _config(args), "variant": str(params.variant), "N": args.N, "M": M,
              "random_elements": consumed, "betas": list(points.betas), "alphas": list(points.alphas),
              "files": files}
    _emit(args, "encode", report)
    return 0


def cmd_simulate(parser, args) -> int:
    from .simulator import DelayModel, FaultPlan, run_round

    _need(parser, args, "N", "K")
    params = _params(args, args.p)
    spec = functions.for_degree(args.deg, args.M)
    delay = DelayModel(args.compute_cost, args.comm_cost, args.delay_prob, args.delay_secs)
    n_s = params.S if args.stragglers is None else args.stragglers
    n_a = params.A if args.adversaries is None else args.adversaries
    rng = np.random.default_rng(args.seed)
    rows, matches, failures = [], 0, 0
    from .errors import DecodingFailure, NotEnoughReturns
    for i in range(args.rounds):
        plan = FaultPlan.random(rng, params.N, n_s, n_a, args.corruption, delay)
        X = [[int(v) for v in rng.integers(0, params.p, size=spec.input_dim)] for _ in range(params.K)]
        try:
            rep = run_round(params, spec, X, plan, int(rng.integers(0, 2**63)))
            row = {"round": i, **rep.as_row(), "error": ""}
            matches += rep.match
        except (DecodingFailure, NotEnoughReturns) as exc:
            failures += 1
            row = {"round": i, "wall_clock": "", "waited_for": "", "corrected_ids": "", "match": False,
                   "within_budget": plan.within(params), "error": type(exc).__name__}
        rows.append(row)
    report = {"config": _config(args), "params": params.as_dict(), "rounds": args.rounds,
              "matches": matches, "decoding_failures": failures,
              "within_budget": n_s <= params.S and n_a <= params.A,
              "region_violated": matches < args.rounds}
    _emit(args, "simulate", report, rows)
    return 0


def cmd_sweep(parser, args) -> int:
    from .simulator import sweep_region

    res = sweep_region(args.max_N, tuple(args.degrees), args.trials, args.max_K, args.p, args.seed)
    report = {"config": _config(args), **{k: v for k, v in res.items() if k != "rows"}}
    _emit(args, "sweep", report, res["rows"])
    return 0 if res["total_failures"] == 0 else 1


def cmd_audit(parser, args) -> int:
    _need(parser, args, "N", "K")
    F = PrimeField(args.p)
    if args.N + args.K + args.T > args.p:
        raise InfeasibleParams(f"p={args.p} is too small for N+K+T={args.N + args.K + args.T} points")
    from .scheme import EvalPoints
    K, T, N = args.K, args.T, args.N
    points = EvalPoints(tuple(range(1, K + T + 1)), tuple(range(K + T + 1, K + T + N + 1)), K, T)
    report = {"config": _config(args), **audit_privacy(F, points, args.M, not args.no_exhaustive)}
    _emit(args, "audit_privacy", report)
    return 0 if report["mds"] != "fail" else 1


def cmd_regress(parser, args) -> int:
    from . import regression
    from .simulator import DelayModel

    kw = {"step": args.step, "momentum": args.momentum, "iterations": args.iters}
    if args.data:
        problem = regression.load_csv(args.data, args.n, args.r, **kw)
    else:
        problem = regression.synthetic(args.m, args.d, args.n, args.r, seed=args.seed, **kw)
    delay = DelayModel(args.compute_cost, args.comm_cost, args.delay_prob, args.delay_secs)
    config = regression.QuantizationConfig(scale=args.scale)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConditioningWarning)
        res = regression.lcc_gd(problem, args.mode, stragglers=args.stragglers, config=config,
                                delay=delay, seed=args.seed)
    report = {"config": _config(args), **regression.summary(problem, res),
              "conditioning_warnings": len(caught)}
    rows = [{"iteration": i, "loss": v} for i, v in enumerate(res.losses)]
    _emit(args, "regress", report, rows)
    return 0


def cmd_bench(parser, args) -> int:
    from .simulator import DelayModel, benchmark

    delay = DelayModel(args.compute_cost, args.comm_cost, args.delay_prob, args.delay_secs)
    runs = [benchmark(args.n, args.r, delay, args.iters, args.seed + k, args.m, args.d)
            for k in range(args.runs)]
    rows = []
    for k, run in enumerate(runs):
        for s in run["schemes"]:
            rows.append({"run": k, **s})
    wins = sum(r["lcc_faster"] for r in runs)
    report = {"config": _config(args), "runs": args.runs, "lcc_faster_runs": wins,
              "waited_for": runs[0]["waited_for"], "R_lcc": runs[0]["R_lcc"],
              "lower_bound": runs[0]["lower_bound"],
              "mean_total": {s["scheme"]: float(np.mean([r["total"] for r in rows if r["scheme"] == s["scheme"]]))
                             for s in runs[0]["schemes"]}}
    print(f"waited_for: lagrange {report['R_lcc']} of N={args.n}; uncoded {args.n} of N={args.n}",
          file=sys.stderr)
    _emit(args, "bench", report, rows)
    return 0


COMMANDS = {
    "plan": cmd_plan,
    "encode": cmd_encode,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "audit-privacy": cmd_audit,
    "regress": cmd_regress,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser, args = _parse(argv)
    try:
        return COMMANDS[args.command](parser, args)
    except InfeasibleParams as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except (LCCError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
