"""Command line: ``run``, ``batch``, ``metrics`` and ``pf``."""

from __future__ import annotations

import argparse
import sys

from . import harness, metrics
from .optimizer import ALGORITHMS
from .problems import ProblemError, get_problem
from .problems.fronts import metric_front, read_points, sample_pf, write_points


def _add_run_flags(p: argparse.ArgumentParser, require_problem: bool) -> None:
    p.add_argument("--problem", required=require_problem, help="UF1-UF10, MOP1-MOP7, WFG1-WFG9")
    p.add_argument("--m", type=int, help="objective count (WFG only)")
    p.add_argument("--algo", choices=ALGORITHMS, default=None,
                   help="selection variant (default aoostm)")
    p.add_argument("--pop", type=int, help="population size (default per suite)")
    p.add_argument("--evals", type=int, help="evaluation budget (default per suite)")
    p.add_argument("--seed", type=int, help="base seed; repetition r uses seed + r")
    p.add_argument("--checkpoint-every", type=int, dest="checkpoint_every",
                   help="record IGD/HV every this many evaluations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moead-astm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one configuration")
    _add_run_flags(p, require_problem=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="results")

    p = sub.add_parser("batch", help="run every experiment of a config file (or the flags)")
    p.add_argument("--config", help="INI file with one experiment per section")
    _add_run_flags(p, require_problem=False)
    p.add_argument("--reps", type=int, help=f"repetitions per config (default {harness.DEFAULT_REPS})")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--out", help="output directory (default results)")

    p = sub.add_parser("metrics", help="score a plot file against the front sample")
    p.add_argument("plot", help="CSV of objective vectors, one per line")
    p.add_argument("--problem", required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--pf", help="front sample CSV (default: generated)")

    p = sub.add_parser("pf", help="write a front sample")
    p.add_argument("--problem", required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--count", type=int, help="points (default: the IGD sample size)")
    p.add_argument("--out", default="pf")
    return parser


def _flag_values(args) -> dict:
    keys = ("problem", "m", "pop", "evals", "seed", "checkpoint_every", "reps")
    values = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    if args.algo is not None:
        values["algo"] = args.algo
    return values


def _execute(configs, reps, jobs, out) -> int:
    results = harness.run_batch(configs, repetitions=reps, jobs=jobs)
    table = harness.aggregate(results)
    path = harness.emit_results(table, results, out)
    for r in results:
        status = f"igd={r.igd!r} hv={r.hv!r}" if r.ok else f"FAILED: {r.error}"
        print(f"{r.config.label} {r.config.algorithm} seed={r.seed} {status}")
    print(f"wrote {path}")
    return 0 if all(r.ok for r in results) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            configs = harness.parse_config(_flag_values(args))
            return _execute(configs, args.reps, args.jobs, args.out)
        if args.command == "batch":
            if args.config:
                spec = harness.parse_config_file(args.config)
                configs = spec.configs
                jobs = args.jobs or spec.jobs or 1
                out = args.out or spec.out or "results"
            else:
                configs = harness.parse_config(_flag_values(args))
                jobs = args.jobs or 1
                out = args.out or "results"
            return _execute(configs, args.reps, jobs, out)
        if args.command == "metrics":
            problem = get_problem(args.problem, m=args.m)
            front = read_points(args.pf) if args.pf else metric_front(problem)
            pts = read_points(args.plot)
            res = metrics.score(pts, front, normalize=problem.name.startswith("WFG"))
            print(f"igd={res['igd']!r} hv={res['hv']!r}")
            return 0
        if args.command == "pf":
            problem = get_problem(args.problem, m=args.m)
            pts = sample_pf(problem, args.count) if args.count else metric_front(problem)
            label = problem.name if problem.m == 2 or not problem.name.startswith("WFG") \
                else f"{problem.name}-m{problem.m}"
            path = f"{args.out}/{label}.csv"
            write_points(path, pts)
            print(f"wrote {len(pts)} points to {path}")
            return 0
    except (harness.ConfigError, ProblemError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
