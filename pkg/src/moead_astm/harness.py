"""Experiment driver: configs, seeded batches, aggregation and CSV output."""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import metrics
from .optimizer import ALGORITHMS, OptimizerConfig, run
from .problems import ProblemError, get_problem, mop, problem_names, uf, wfg
from .problems.fronts import metric_front, write_points

DEFAULT_REPS = 11
WFG_POP = {2: 250, 3: 91, 5: 210, 8: 156, 10: 275}
DEFAULT_EVALS = 300_000
WFG2_EVALS = 25_000
METRICS = ("igd", "hv")

RUN_KEYS = {
    "problem", "m", "algo", "pop", "evals", "seed", "checkpoint_every",
    "reps", "n", "k", "l", "operator", "cr", "f", "pc", "eta_c", "pm", "eta_m",
    "neighborhood", "delta",
}
BATCH_KEYS = {"jobs", "out"}


class ConfigError(ValueError):
    """A configuration value is missing, unknown or invalid."""


@dataclass(frozen=True)
class RunConfig:
    problem: str
    algorithm: str = "aoostm"
    m: int | None = None
    pop: int | None = None
    evals: int | None = None
    seed: int = 0
    reps: int = DEFAULT_REPS
    checkpoint_every: int | None = None
    n: int | None = None
    k: int | None = None
    l: int | None = None
    operator: str | None = None
    cr: float | None = None
    f: float | None = None
    pc: float = 1.0
    eta_c: float = 30.0
    pm: float | None = None
    eta_m: float = 20.0
    neighborhood: int = 20
    delta: float = 0.9

    @property
    def label(self) -> str:
        """Problem label used in tables and file names."""
        if self.problem.startswith("WFG") and self.m != 2:
            return f"{self.problem}-m{self.m}"
        return self.problem

    def digest(self) -> str:
        payload = {k: v for k, v in asdict(self).items() if k not in ("seed", "reps")}
        text = json.dumps(payload, sort_keys=True)
        return hashlib.sha1(text.encode()).hexdigest()[:12]

    def problem_instance(self):
        return get_problem(self.problem, m=self.m, n=self.n, k=self.k, l=self.l)

    def optimizer_config(self, seed: int) -> OptimizerConfig:
        return OptimizerConfig(
            problem=self.problem_instance(),
            algorithm=self.algorithm,
            pop_size=self.pop,
            max_evals=self.evals,
            seed=seed,
            neighborhood=self.neighborhood,
            delta=self.delta,
            operator=self.operator,
            cr=self.cr,
            f=self.f,
            pc=self.pc,
            eta_c=self.eta_c,
            pm=self.pm,
            eta_m=self.eta_m,
            checkpoint_every=self.checkpoint_every,
        )


def default_population(problem: str, m: int) -> int | None:
    if problem in uf.FUNCS:
        return 1000 if uf.objectives(problem) == 3 else 600
    if problem in mop.FUNCS:
        return 300 if mop.objectives(problem) == 3 else 100
    return WFG_POP.get(m)


def default_budget(problem: str, m: int) -> int | None:
    if problem in uf.FUNCS or problem in mop.FUNCS:
        return DEFAULT_EVALS
    return WFG2_EVALS if m == 2 else None


def resolve(config: RunConfig) -> RunConfig:
    """Validate and fill in the per-suite defaults."""
    name = config.problem.upper()
    if name not in problem_names():
        raise ConfigError(f"unknown problem {config.problem!r}")
    if config.algorithm not in ALGORITHMS:
        raise ConfigError(
            f"unknown algorithm {config.algorithm!r}; valid algorithms: {', '.join(ALGORITHMS)}"
        )
    if name in uf.FUNCS or name in mop.FUNCS:
        fixed = (uf if name in uf.FUNCS else mop).objectives(name)
        if config.m is not None and config.m != fixed:
            raise ConfigError(f"{name} has {fixed} objectives, not {config.m}")
        m = fixed
    else:
        m = 2 if config.m is None else config.m
        if m < 2:
            raise ConfigError(f"objective count must be at least 2, got {m}")
    pop = config.pop if config.pop is not None else default_population(name, m)
    if pop is None:
        raise ConfigError(f"no default population for {name} with m={m}; pass --pop")
    evals = config.evals if config.evals is not None else default_budget(name, m)
    if evals is None:
        raise ConfigError(
            f"no default evaluation budget for {name} with m={m}; pass --evals"
        )
    if pop < 2:
        raise ConfigError(f"population size must be at least 2, got {pop}")
    if evals < pop:
        raise ConfigError(f"evaluation budget {evals} is smaller than the population {pop}")
    if config.reps < 1:
        raise ConfigError(f"repetitions must be positive, got {config.reps}")
    wfg_many = name in wfg.KERNELS and m >= 3
    wfg_two = name in wfg.KERNELS and m == 2
    operator = config.operator or ("sbx" if wfg_many else "de")
    if operator not in ("de", "sbx"):
        raise ConfigError(f"unknown operator {operator!r}; choose de or sbx")
    cr = config.cr if config.cr is not None else (0.5 if wfg_two else 1.0)
    f = config.f if config.f is not None else 0.5
    out = replace(config, problem=name, m=m, pop=pop, evals=evals,
                  operator=operator, cr=cr, f=f)
    try:
        prob = out.problem_instance()
        OptimizerConfig(
            problem=prob, algorithm=out.algorithm, pop_size=pop, max_evals=evals,
            neighborhood=out.neighborhood, delta=out.delta, operator=operator,
            cr=cr, f=f, pc=out.pc, eta_c=out.eta_c, pm=out.pm, eta_m=out.eta_m,
            checkpoint_every=out.checkpoint_every,
        ).variation_params()
    except (ProblemError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return replace(out, n=prob.n, k=prob.wfg_k, l=prob.wfg_l)


_INT_KEYS = {"m", "pop", "evals", "seed", "checkpoint_every", "reps", "n", "k", "l",
             "neighborhood", "jobs"}
_FLOAT_KEYS = {"cr", "f", "pc", "eta_c", "pm", "eta_m", "delta"}


def _convert(key: str, raw: str, where: str):
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{where}: {key} must be an integer, got {raw!r}") from None
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{where}: {key} must be a number, got {raw!r}") from None
    return raw.strip()


def config_from_mapping(values: Mapping[str, object], where: str = "flags") -> RunConfig:
    unknown = set(values) - RUN_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {', '.join(sorted(unknown))}")
    if "problem" not in values or not values["problem"]:
        raise ConfigError(f"{where}: a problem is required")
    kwargs = {("algorithm" if k == "algo" else k): v for k, v in values.items() if v is not None}
    return resolve(RunConfig(**kwargs))


@dataclass
class BatchSpec:
    configs: list[RunConfig]
    jobs: int | None = None
    out: str | None = None


def parse_config_file(path) -> BatchSpec:
    """INI file, one experiment per section. ``[DEFAULT]`` values apply to
    every section and may also set ``jobs`` and ``out`` for the batch."""
    parser = configparser.ConfigParser(interpolation=None)
    with open(path) as fh:
        parser.read_file(fh)
    defaults = dict(parser.defaults())
    spec = BatchSpec([])
    for key in list(defaults):
        if key in BATCH_KEYS:
            raw = defaults.pop(key)
            setattr(spec, key, _convert(key, raw, "[DEFAULT]"))
    for section in parser.sections():
        where = f"[{section}]"
        values = {}
        for key, raw in parser.items(section):
            if key in BATCH_KEYS:
                if key in parser.defaults():
                    continue
                raise ConfigError(f"{where}: {key} may only be set in [DEFAULT]")
            values[key] = _convert(key, raw, where)
        spec.configs.append(config_from_mapping(values, where))
    if not spec.configs:
        raise ConfigError(f"{path}: no experiment sections")
    return spec


def parse_config(source) -> list[RunConfig]:
    """Configs from an INI path or a mapping of flag values."""
    if isinstance(source, Mapping):
        return [config_from_mapping(source)]
    return parse_config_file(source).configs


@dataclass
class RunResult:
    config: RunConfig
    seed: int
    rep: int
    igd: float = float("nan")
    hv: float = float("nan")
    neval: int = 0
    generations: int = 0
    wall_ms: float = 0.0
    f: np.ndarray | None = field(default=None, repr=False)
    checkpoints: list = field(default_factory=list, repr=False)
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def _scorer(problem):
    front = metric_front(problem)
    normalized = problem.name.startswith("WFG")

    def fn(points):
        return metrics.score(points, front, normalize=normalized)

    return fn


def run_single(config: RunConfig, seed: int, rep: int = 0) -> RunResult:
    """One optimizer run plus its final metrics; failures are captured."""
    try:
        opt = config.optimizer_config(seed)
        scorer = _scorer(opt.problem)
        record = run(opt, checkpoint=(lambda s: scorer(s.f)) if config.checkpoint_every else None)
        final = scorer(record.f)
        return RunResult(
            config, seed, rep, final["igd"], final["hv"], record.neval,
            record.generations, record.wall_ms, record.f, record.checkpoints,
        )
    except Exception as exc:  # recorded, the batch carries on
        detail = traceback.format_exception_only(type(exc), exc)[-1].strip()
        return RunResult(config, seed, rep, error=detail)


def _task(args):
    config, seed, rep = args
    return run_single(config, seed, rep)


def run_batch(configs: Sequence[RunConfig], repetitions: int | None = None,
              jobs: int = 1) -> list[RunResult]:
    """Every config run ``repetitions`` times (default: each config's own
    ``reps``) with seeds ``seed + rep``. Results come back grouped by
    config, then by repetition, whatever the execution order."""
    tasks = []
    for cfg in configs:
        reps = cfg.reps if repetitions is None else repetitions
        tasks.extend((cfg, cfg.seed + rep, rep) for rep in range(reps))
    if jobs <= 1 or len(tasks) <= 1:
        return [_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_task, tasks))


@dataclass
class ResultTable:
    """One row per (problem, algorithm, metric) and per-algorithm rank totals."""

    rows: list[dict]
    totals: list[dict]


def _rank(values: list[float], descending: bool) -> list[int]:
    keyed = [(-v if descending else v, i) for i, v in enumerate(values)]
    order = sorted(range(len(values)), key=lambda i: keyed[i])
    ranks = [0] * len(values)
    for pos, i in enumerate(order):
        ranks[i] = pos + 1
    return ranks


def aggregate(results: Iterable[RunResult]) -> ResultTable:
    """Mean and population std per cell, ranked within each problem
    (IGD ascending, HV descending, ties by listed order); totals sum ranks
    over problems and the final rank orders the totals."""
    cells: dict[tuple[str, str], list[RunResult]] = {}
    for res in results:
        if res.ok:
            cells.setdefault((res.config.label, res.config.algorithm), []).append(res)
    problems = list(dict.fromkeys(p for p, _ in cells))
    algorithms = list(dict.fromkeys(a for _, a in cells))
    rows = []
    totals = {(a, mt): 0 for a in algorithms for mt in METRICS}
    for prob in problems:
        present = [a for a in algorithms if (prob, a) in cells]
        for mt in METRICS:
            vals = [np.asarray([getattr(r, mt) for r in cells[(prob, a)]]) for a in present]
            means = [float(v.mean()) for v in vals]
            ranks = _rank(means, descending=(mt == "hv"))
            for a, v, mean, rank in zip(present, vals, means, ranks):
                rows.append({
                    "problem": prob, "algorithm": a, "metric": mt, "mean": mean,
                    "std": float(v.std()), "rank": rank, "runs": len(v),
                })
                totals[(a, mt)] += rank
    total_rows = []
    for mt in METRICS:
        sums = [totals[(a, mt)] for a in algorithms]
        finals = _rank([float(s) for s in sums], descending=False)
        for a, s, fr in zip(algorithms, sums, finals):
            total_rows.append({"algorithm": a, "metric": mt, "total_rank": s, "final_rank": fr})
    return ResultTable(rows, total_rows)


def performance_score(outperform) -> list[int]:
    """``P(A_i) = sum_j delta_ij``: how many algorithms beat algorithm i."""
    mat = np.asarray(outperform, dtype=bool)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("outperform matrix must be square")
    if np.any(np.diag(mat)):
        raise ValueError("an algorithm cannot outperform itself")
    return mat.sum(axis=1).astype(int).tolist()


def outperform_by_mean(table: ResultTable, problem: str, metric: str) -> tuple[list[str], np.ndarray]:
    """A non-statistical stand-in for significance tests: ``delta_ij`` is
    set when algorithm j's mean is strictly better than algorithm i's."""
    rows = [r for r in table.rows if r["problem"] == problem and r["metric"] == metric]
    names = [r["algorithm"] for r in rows]
    means = np.array([r["mean"] for r in rows])
    sign = -1.0 if metric == "hv" else 1.0
    better = sign * means[None, :] < sign * means[:, None]
    np.fill_diagonal(better, False)
    return names, better


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


SUMMARY_HEADER = ("problem", "algorithm", "metric", "mean", "std", "rank", "runs")
RUNS_HEADER = ("config_hash", "problem", "algorithm", "seed", "igd", "hv", "neval",
               "wall_ms", "error")
RANKS_HEADER = ("algorithm", "metric", "total_rank", "final_rank")


def emit_results(table: ResultTable, results: Sequence[RunResult], out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "summary.csv", SUMMARY_HEADER,
               ([r[k] for k in SUMMARY_HEADER] for r in table.rows))
    _write_csv(out / "ranks.csv", RANKS_HEADER,
               ([r[k] for k in RANKS_HEADER] for r in table.totals))
    _write_csv(out / "runs.csv", RUNS_HEADER, (
        (r.config.digest(), r.config.label, r.config.algorithm, r.seed, r.igd, r.hv,
         r.neval, round(r.wall_ms, 3), r.error)
        for r in results
    ))
    fronts_done = set()
    for r in results:
        if not r.ok:
            continue
        write_points(out / "plot" / f"{r.config.label}_{r.config.algorithm}_{r.seed}.csv", r.f)
        if r.checkpoints:
            _write_csv(
                out / "trace" / f"{r.config.label}_{r.config.algorithm}_{r.seed}.csv",
                ("neval", "igd", "hv"),
                ((c["neval"], c["igd"], c["hv"]) for c in r.checkpoints),
            )
        if r.config.label not in fronts_done:
            fronts_done.add(r.config.label)
            write_points(out / "pf" / f"{r.config.label}.csv",
                         metric_front(r.config.problem_instance()))
    return out
