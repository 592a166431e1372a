"""The decomposition main loop with dynamic resource allocation.

Each generation a subset of subproblems (chosen by utility tournaments,
boundary subproblems always in) produces one offspring each. Offspring and
the current population are pooled and a selection operator cuts the pool
back to N solutions, each tied to a subproblem. Every 30 generations the
utilities are refreshed from the relative improvement of each subproblem.

Random draws come from one generator per run, in this order: weights
padding and initial population, the initial assignment, then per
generation the tournaments, for each active subproblem its pool draw and
parent picks, the batched operator draws, and finally selection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decomposition import (
    NormalizationContext,
    build_neighborhoods,
    clamp_weights,
    normalize,
    update_ideal,
    weights_for_population,
)
from .matching import Matching, _Picker
from .problems import Problem
from .selection import SELECTORS, SelectionContext
from .variation import VariationParams, de_rand_1, poly_mutation, sbx

ALGORITHMS = tuple(SELECTORS)
TOURNAMENT_SIZE = 10
ACTIVE_FRACTION = 5
IMPROVEMENT_THRESHOLD = 0.001
DECAY = 0.95
G_OLD_FLOOR = 1e-12


class ConfigError(ValueError):
    """Invalid optimizer settings."""


@dataclass(frozen=True)
class OptimizerConfig:
    problem: Problem
    algorithm: str = "aoostm"
    pop_size: int = 100
    max_evals: int = 300_000
    seed: int = 0
    neighborhood: int = 20
    delta: float = 0.9
    operator: str = "de"
    cr: float = 1.0
    f: float = 0.5
    pc: float = 1.0
    eta_c: float = 30.0
    pm: float | None = None
    eta_m: float = 20.0
    ell_max: int | None = None  # defaults to the neighborhood size
    utility_period: int = 30
    checkpoint_every: int | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; choose one of {', '.join(ALGORITHMS)}"
            )
        if self.operator not in ("de", "sbx"):
            raise ConfigError(f"unknown operator {self.operator!r}; choose 'de' or 'sbx'")
        if self.pop_size < 2:
            raise ConfigError(f"population size must be at least 2, got {self.pop_size}")
        if self.max_evals < self.pop_size:
            raise ConfigError(
                f"budget {self.max_evals} cannot cover the initial population of {self.pop_size}"
            )
        if self.neighborhood < 1:
            raise ConfigError(f"neighborhood size must be positive, got {self.neighborhood}")
        if not 0.0 <= self.delta <= 1.0:
            raise ConfigError(f"delta must be in [0, 1], got {self.delta}")
        if self.utility_period < 1:
            raise ConfigError("utility period must be positive")
        if self.checkpoint_every is not None and self.checkpoint_every < 1:
            raise ConfigError("checkpoint interval must be positive")
        if self.ell_max is not None and self.ell_max < self.problem.m:
            raise ConfigError(f"ell_max={self.ell_max} is below m={self.problem.m}")

    @property
    def t(self) -> int:
        return min(self.neighborhood, self.pop_size)

    @property
    def list_length(self) -> int:
        return self.t if self.ell_max is None else self.ell_max

    def variation_params(self) -> VariationParams:
        return VariationParams(
            self.problem.lower, self.problem.upper, cr=self.cr, f=self.f,
            pc=self.pc, eta_c=self.eta_c, pm=self.pm, eta_m=self.eta_m,
        )

    def echo(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "problem"}
        out["problem"] = self.problem.name
        out["m"] = self.problem.m
        out["n"] = self.problem.n
        return out


@dataclass
class OptimizerState:
    """Population row k is tied to subproblem ``owner[k]``."""

    config: OptimizerConfig
    weights: np.ndarray
    neighbors: np.ndarray
    utility: np.ndarray
    saved_g: np.ndarray
    x: np.ndarray
    f: np.ndarray
    owner: np.ndarray
    norm: NormalizationContext
    rng: np.random.Generator
    params: VariationParams
    neval: int = 0
    iteration: int = 0
    last_active: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.picker = _Picker(self.rng)
        self.neighbor_lists = self.neighbors.tolist()

    @property
    def n_sub(self) -> int:
        return len(self.weights)

    def members(self) -> list[np.ndarray]:
        """Population rows held by each subproblem."""
        order = np.argsort(self.owner, kind="stable")
        counts = np.bincount(self.owner, minlength=self.n_sub)
        return np.split(order, np.cumsum(counts)[:-1])

    def matching(self) -> Matching:
        return Matching.from_pairs(
            zip(self.owner.tolist(), range(len(self.owner))),
            many_one=self.config.algorithm in ("amostm", "dra"),
        )


@dataclass
class RunRecord:
    config: dict
    seed: int
    neval: int
    generations: int
    checkpoints: list[dict]
    x: np.ndarray
    f: np.ndarray
    wall_ms: float

    def same_result(self, other: "RunRecord") -> bool:
        """Equality of everything except wall time."""
        return (
            self.config == other.config
            and self.seed == other.seed
            and self.neval == other.neval
            and self.generations == other.generations
            and self.checkpoints == other.checkpoints
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.f, other.f)
        )


def _g(f: np.ndarray, weights: np.ndarray, ideal: np.ndarray) -> np.ndarray:
    """Row-wise Tchebycheff value of ``f[k]`` on ``weights[k]``."""
    return np.max(np.abs(f - ideal) / clamp_weights(weights), axis=-1)


def initialize(config: OptimizerConfig, rng: np.random.Generator | None = None) -> OptimizerState:
    rng = np.random.default_rng(config.seed) if rng is None else rng
    problem = config.problem
    n = config.pop_size
    weights = weights_for_population(problem.m, n, rng)
    neighbors = build_neighborhoods(weights, config.t)
    x = problem.sample(n, rng)
    f = problem.evaluate(x)
    norm = NormalizationContext.fresh(problem.m)
    update_ideal(norm, f)
    owner = rng.permutation(n)
    saved = _g(f, weights[owner], norm.ideal)
    # store rows in subproblem order so row k belongs to subproblem k
    order = np.argsort(owner)
    state = OptimizerState(
        config=config,
        weights=weights,
        neighbors=neighbors,
        utility=np.ones(n),
        saved_g=saved[order],
        x=x[order],
        f=f[order],
        owner=owner[order],
        norm=norm,
        rng=rng,
        params=config.variation_params(),
        neval=n,
    )
    return state


def boundary_subproblems(weights: np.ndarray) -> list[int]:
    """For each axis, the first subproblem with the largest weight on it."""
    out = []
    for k in range(weights.shape[1]):
        j = int(np.argmax(weights[:, k]))
        if j not in out:
            out.append(j)
    return out


def select_active_subproblems(state: OptimizerState) -> np.ndarray:
    """Boundary subproblems plus tournament winners, ``N // 5`` in total.

    Each tournament draws up to 10 distinct subproblems not yet chosen and
    keeps the one with the highest utility (first drawn on ties).
    """
    n = state.n_sub
    chosen = boundary_subproblems(state.weights)
    target = max(n // ACTIVE_FRACTION, len(chosen))
    taken = set(chosen)
    remaining = [j for j in range(n) if j not in taken]
    util = state.utility.tolist()
    pick = state.picker
    while len(chosen) < target and remaining:
        size = min(TOURNAMENT_SIZE, len(remaining))
        best = -1
        for pos in pick.distinct(len(remaining), size):
            if best < 0 or util[remaining[pos]] > util[remaining[best]]:
                best = pos
        chosen.append(remaining.pop(best))
    return np.asarray(chosen, dtype=np.int64)


def _mating(state: OptimizerState, active: np.ndarray):
    """Per active subproblem: base row and the other parent rows.

    Parents other than the base are distinct and never the base itself.
    """
    cfg = state.config
    pick = state.picker
    one_one = cfg.algorithm in ("aoostm", "stm")
    members = None if one_one else [m.tolist() for m in state.members()]
    size = len(state.x)
    need = 2 if cfg.operator == "de" else 1
    neighbors = state.neighbor_lists
    bases, mates = [], []
    for i in active.tolist():
        if one_one:
            local = neighbors[i]
        else:
            local = [r for j in neighbors[i] for r in members[j]]
        use_local = pick.random() < cfg.delta and len(local) >= cfg.t
        if one_one:
            base = i
        else:
            mine = members[i]
            if len(mine) == 1:
                base = mine[0]
            elif mine:
                g = _g(state.f[mine], state.weights[i], state.norm.ideal)
                base = mine[int(np.argmin(g))]
            else:
                pool = local if use_local else range(size)
                base = pool[pick(len(pool))]
        if use_local:
            others = [r for r in local if r != base]
        else:
            others = None
        if others is not None and len(others) >= need:
            picks = [others[k] for k in pick.distinct(len(others), need)]
        else:
            # whole population minus the base, indexed without building it
            picks = [k if k < base else k + 1 for k in pick.distinct(size - 1, need)]
        bases.append(base)
        mates.append(picks)
    return np.asarray(bases, dtype=np.int64), np.asarray(mates, dtype=np.int64)


def _offspring(state: OptimizerState, bases: np.ndarray, mates: np.ndarray) -> np.ndarray:
    x = state.x
    if state.config.operator == "de":
        child = de_rand_1(x[bases], x[mates[:, 0]], x[mates[:, 1]], state.params, state.rng)
    else:
        child, _ = sbx(x[bases], x[mates[:, 0]], state.params, state.rng)
    return poly_mutation(child, state.params, state.rng)


def _select(state: OptimizerState, x_all: np.ndarray, f_all: np.ndarray) -> None:
    cfg = state.config
    f_norm, _ = normalize(f_all, state.norm)
    ctx = SelectionContext(state.weights, f_norm, f_all, cfg.list_length, state.norm.ideal)
    matching = SELECTORS[cfg.algorithm](ctx, state.rng)
    pairs = matching.sorted_pairs()
    owner = [p for p, _ in pairs]
    rows = [x for _, x in pairs]
    if cfg.algorithm == "amostm" and len(rows) < state.n_sub:
        owner, rows = _fill_deficit(state, f_all, owner, rows)
    state.owner = np.asarray(owner, dtype=np.int64)
    rows = np.asarray(rows, dtype=np.int64)
    state.x = x_all[rows]
    state.f = f_all[rows]


def _fill_deficit(state, f_all, owner, rows):
    """Top up a short many-one population: subproblems holding nothing take,
    in index order, their best remaining pool solution."""
    n = state.n_sub
    taken = set(rows)
    held = set(owner)
    empty = [p for p in range(n) if p not in held] or list(range(n))
    pairs = list(zip(owner, rows))
    k = 0
    while len(pairs) < n:
        p = empty[k % len(empty)]
        left = np.array([r for r in range(len(f_all)) if r not in taken])
        g = _g(f_all[left], state.weights[p], state.norm.ideal)
        best = int(left[np.argmin(g)])
        taken.add(best)
        pairs.append((p, best))
        k += 1
    pairs.sort()
    return [p for p, _ in pairs], [r for _, r in pairs]


def update_utility(state: OptimizerState) -> OptimizerState:
    """Refresh utilities from the relative improvement of each subproblem's
    best held value since the last refresh, then store the new values."""
    members = state.members()
    ideal = state.norm.ideal
    for i, rows in enumerate(members):
        if len(rows) == 0:
            delta = 0.0
            best = None
        else:
            best = float(np.min(_g(state.f[rows], state.weights[i], ideal)))
            old = state.saved_g[i]
            delta = 0.0 if old < G_OLD_FLOOR else (old - best) / old
        state.utility[i] = utility_step(state.utility[i], delta)
        if best is not None:
            state.saved_g[i] = best
    return state


def utility_step(pi: float, delta: float) -> float:
    if delta > IMPROVEMENT_THRESHOLD:
        return 1.0
    if delta < 0:
        return DECAY * pi
    return (DECAY + (1 - DECAY) * delta / IMPROVEMENT_THRESHOLD) * pi


def evolve_generation(state: OptimizerState) -> OptimizerState:
    cfg = state.config
    budget = cfg.max_evals - state.neval
    if budget <= 0:
        raise ConfigError("evaluation budget already exhausted")
    active = select_active_subproblems(state)[:budget]
    state.last_active = active
    bases, mates = _mating(state, active)
    child = _offspring(state, bases, mates)
    f_child = cfg.problem.evaluate(child)
    state.neval += len(child)
    update_ideal(state.norm, f_child)
    _select(state, np.vstack([state.x, child]), np.vstack([state.f, f_child]))
    state.iteration += 1
    if state.iteration % cfg.utility_period == 0:
        update_utility(state)
    return state


def run(
    config: OptimizerConfig,
    checkpoint: Callable[[OptimizerState], dict] | None = None,
) -> RunRecord:
    """Run to the evaluation budget.

    ``checkpoint(state)`` is called whenever the evaluation count crosses a
    multiple of ``config.checkpoint_every`` and once at the end; its dict is
    stored with the evaluation count.
    """
    start = time.perf_counter()
    state = initialize(config)
    records: list[dict] = []
    every = config.checkpoint_every

    def record():
        if checkpoint is None:
            return
        if records and records[-1]["neval"] == state.neval:
            return
        records.append({"neval": state.neval, **checkpoint(state)})

    next_mark = every if every else None
    while state.neval < config.max_evals:
        evolve_generation(state)
        if next_mark is not None and state.neval >= next_mark:
            record()
            while next_mark <= state.neval:
                next_mark += every
    record()
    wall = (time.perf_counter() - start) * 1e3
    return RunRecord(
        config=config.echo(),
        seed=config.seed,
        neval=state.neval,
        generations=state.iteration,
        checkpoints=records,
        x=state.x.copy(),
        f=state.f.copy(),
        wall_ms=wall,
    )
