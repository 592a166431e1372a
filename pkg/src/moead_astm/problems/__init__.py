"""Benchmark registry: UF1-UF10, MOP1-MOP7 and WFG1-WFG9."""

from __future__ import annotations

import numpy as np

from . import mop, uf, wfg
from .base import Problem, ProblemError, dominates, nondominated_mask

__all__ = [
    "Problem", "ProblemError", "dominates", "nondominated_mask",
    "get_problem", "problem_names", "pareto_set_point",
]

UF_DEFAULT_N = 30
MOP_DEFAULT_N = 10


def problem_names() -> list[str]:
    return list(uf.FUNCS) + list(mop.FUNCS) + list(wfg.KERNELS)


def get_problem(name: str, m: int | None = None, n: int | None = None,
                k: int | None = None, l: int | None = None) -> Problem:
    """Build a benchmark instance by name (case-insensitive).

    UF and MOP instances have a fixed number of objectives; ``m`` is checked
    if given. WFG instances default to two objectives with k/l chosen from m.
    """
    key = name.upper()
    if key in uf.FUNCS or key in mop.FUNCS:
        family = uf if key in uf.FUNCS else mop
        fixed_m = family.objectives(key)
        if m is not None and m != fixed_m:
            raise ProblemError(f"{key} has {fixed_m} objectives, not {m}")
        if n is None:
            n = UF_DEFAULT_N if family is uf else MOP_DEFAULT_N
        min_n = fixed_m + (2 if family is uf else 1)
        if n < min_n:
            raise ProblemError(f"{key} needs at least {min_n} variables")
        if family is uf:
            lower, upper = uf.box(key, n)
        else:
            lower, upper = np.zeros(n), np.ones(n)
        return Problem(key, fixed_m, n, lower, upper, family.FUNCS[key])
    if key in wfg.KERNELS:
        m = 2 if m is None else m
        if m < 2:
            raise ProblemError(f"WFG needs at least 2 objectives, got {m}")
        dk, dl = wfg.default_kl(m)
        k = dk if k is None else k
        l = dl if l is None else l
        if k < 1 or k % (m - 1):
            raise ProblemError(f"k={k} must be a positive multiple of m-1={m - 1}")
        if l < 1 or (key in ("WFG2", "WFG3") and l % 2):
            raise ProblemError(f"l={l} is invalid for {key}")
        total = k + l
        if n is not None and n != total:
            raise ProblemError(f"{key} with k={k}, l={l} has {total} variables, not {n}")
        upper = 2.0 * np.arange(1, total + 1)
        return Problem(key, m, total, np.zeros(total), upper,
                       wfg.make_func(key, k, m), wfg_k=k, wfg_l=l)
    raise ProblemError(f"unknown problem {name!r}")


def pareto_set_point(problem: Problem, t) -> np.ndarray:
    """A Pareto-optimal decision vector for position parameter(s) ``t``."""
    if problem.name in uf.FUNCS:
        return uf.pareto_set_point(problem.name, t, problem.n)
    if problem.name in mop.FUNCS:
        return mop.pareto_set_point(problem.name, t, problem.n)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size == 1:
        t = np.full(problem.wfg_k, t[0])
    return wfg.pareto_set_point(problem.name, t, problem.wfg_k, problem.wfg_l)
