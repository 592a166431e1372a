"""Environmental selection by matching subproblems with solutions.

A subproblem ranks solutions by ``max_i |f_i| / w_i`` on normalized
objectives (smaller is better). A solution ranks subproblems by the
perpendicular distance of its normalized objective vector to each weight
direction. Ties go to the lower index on both sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .decomposition import clamp_weights, perp_distance_matrix
from .matching import (
    UNACCEPTABLE,
    ContractViolation,
    Matching,
    PreferenceProfile,
    many_one_match,
    stable_match_complete,
    stable_match_incomplete,
)


@dataclass(frozen=True)
class SelectionContext:
    """Everything selection needs about one generation.

    ``weights`` is (N, m); ``normalized`` and ``raw`` are (Q, m). ``ideal``
    defaults to the componentwise minimum of ``raw``.
    """

    weights: np.ndarray
    normalized: np.ndarray
    raw: np.ndarray
    ell_max: int
    ideal: np.ndarray | None = None

    def __post_init__(self):
        w = np.atleast_2d(np.asarray(self.weights, dtype=float))
        fn = np.atleast_2d(np.asarray(self.normalized, dtype=float))
        fr = np.atleast_2d(np.asarray(self.raw, dtype=float))
        if fn.shape != fr.shape:
            raise ContractViolation(
                f"normalized {fn.shape} and raw {fr.shape} objectives differ in shape"
            )
        if w.shape[1] != fn.shape[1]:
            raise ContractViolation(
                f"weights have {w.shape[1]} objectives, solutions have {fn.shape[1]}"
            )
        if self.ell_max < w.shape[1]:
            raise ContractViolation(
                f"ell_max={self.ell_max} is below the objective count {w.shape[1]}"
            )
        ideal = fr.min(axis=0) if self.ideal is None else np.asarray(self.ideal, dtype=float)
        if ideal.shape != (w.shape[1],):
            raise ContractViolation(f"ideal point has shape {ideal.shape}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "normalized", fn)
        object.__setattr__(self, "raw", fr)
        object.__setattr__(self, "ideal", ideal)

    @property
    def m(self) -> int:
        return self.weights.shape[1]

    @property
    def n_sub(self) -> int:
        return len(self.weights)

    @property
    def n_sol(self) -> int:
        return len(self.normalized)

    @property
    def list_cap(self) -> int:
        """Longest usable solution-side list: ``ell_max`` capped at N."""
        return min(self.ell_max, self.n_sub)

    @cached_property
    def delta_p(self) -> np.ndarray:
        """(N, Q): subproblem-side preference values."""
        inv = 1.0 / clamp_weights(self.weights)
        f = np.abs(self.normalized)
        out = np.multiply.outer(inv[:, 0], f[:, 0])
        for k in range(1, self.m):
            np.maximum(out, np.multiply.outer(inv[:, k], f[:, k]), out=out)
        return out

    @cached_property
    def delta_x(self) -> np.ndarray:
        """(Q, N): solution-side preference values."""
        return perp_distance_matrix(self.normalized, self.weights)

    @cached_property
    def sub_order(self) -> np.ndarray:
        """(N, Q): each subproblem's ranking of solutions."""
        return np.argsort(self.delta_p, axis=1, kind="stable")

    @cached_property
    def sol_order(self) -> np.ndarray:
        """(Q, N): each solution's ranking of subproblems."""
        return np.argsort(self.delta_x, axis=1, kind="stable")

    @cached_property
    def sol_top(self) -> np.ndarray:
        """(Q, list_cap): the first ``list_cap`` entries of each solution's list."""
        return _stable_top(self.delta_x, self.list_cap)

    @cached_property
    def sub_rank(self) -> np.ndarray:
        """(N, Q): position of solution x on subproblem p's list."""
        return _inverse(self.sub_order)

    @cached_property
    def sol_rank(self) -> np.ndarray:
        """(Q, N): position of subproblem p on solution x's list."""
        return _inverse(self.sol_order)


def _inverse(order: np.ndarray) -> np.ndarray:
    rank = np.empty_like(order)
    rows = np.arange(order.shape[0])[:, None]
    rank[rows, order] = np.arange(order.shape[1])[None, :]
    return rank


def _stable_top(values: np.ndarray, k: int) -> np.ndarray:
    """Row-wise first ``k`` indices of a stable ascending argsort."""
    n = values.shape[1]
    if k >= n:
        return np.argsort(values, axis=1, kind="stable")
    part = np.argpartition(values, k - 1, axis=1)[:, :k]
    part_vals = np.take_along_axis(values, part, axis=1)
    kth = part_vals.max(axis=1)
    order = np.lexsort((part, part_vals), axis=-1)
    top = np.take_along_axis(part, order, axis=1)
    # a tie straddling position k may have been resolved arbitrarily
    ties = np.count_nonzero(values <= kth[:, None], axis=1) > k
    if ties.any():
        top[ties] = np.argsort(values[ties], axis=1, kind="stable")[:, :k]
    return top


def _listed_by(ctx: SelectionContext, right: list[list[int]]):
    """Per subproblem, the solutions whose lists contain it, ordered by the
    subproblem's preference, and the rank each has on its full list.

    Only these pairs are acceptable, so the engine never consults other
    ranks. Sorting values is far cheaper than a full stable argsort.
    """
    counts = [len(row) for row in right]
    sub = np.fromiter((p for row in right for p in row), dtype=np.int64, count=sum(counts))
    sol = np.repeat(np.arange(ctx.n_sol), counts)
    d = ctx.delta_p[sub, sol]
    order = np.lexsort((sol, d, sub))
    sub, sol, d = sub[order], sol[order], d[order]
    bounds = np.searchsorted(sub, np.arange(ctx.n_sub + 1))
    srt = np.sort(ctx.delta_p, axis=1)
    rank = np.empty(len(sub), dtype=np.int64)
    for p in range(ctx.n_sub):
        a, b = bounds[p], bounds[p + 1]
        if a == b:
            continue
        lo = np.searchsorted(srt[p], d[a:b], side="left")
        hi = np.searchsorted(srt[p], d[a:b], side="right")
        for t in np.flatnonzero(hi - lo > 1).tolist():
            # equal values rank by solution index
            equal = np.flatnonzero(ctx.delta_p[p] == d[a + t])
            lo[t] += np.searchsorted(equal, sol[a + t])
        rank[a:b] = lo
    sol_l, rank_l = sol.tolist(), rank.tolist()
    lists = [sol_l[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
    ranks = [dict(zip(sol_l[a:b], rank_l[a:b])) for a, b in zip(bounds[:-1], bounds[1:])]
    return lists, ranks


def _lengths_array(ctx: SelectionContext, lengths) -> np.ndarray:
    if isinstance(lengths, str):
        if lengths != "complete":
            raise ContractViolation(f"lengths must be 'complete' or a sequence, got {lengths!r}")
        return np.full(ctx.n_sol, ctx.n_sub, dtype=np.int64)
    r = np.asarray(lengths, dtype=np.int64)
    if r.shape != (ctx.n_sol,):
        raise ContractViolation(f"expected {ctx.n_sol} list lengths, got shape {r.shape}")
    if np.any(r < 1) or np.any(r > ctx.n_sub):
        raise ContractViolation(f"list lengths must lie in [1, {ctx.n_sub}]")
    return r


def build_preference_profile(ctx: SelectionContext, lengths="complete") -> PreferenceProfile:
    """Both sides' rankings; solution lists are cut to ``lengths``."""
    r = _lengths_array(ctx, lengths)
    left = ctx.sub_order.tolist()
    right = [row[:k] for row, k in zip(ctx.sol_order.tolist(), r.tolist())]
    rank = np.where(ctx.sol_rank < r[:, None], ctx.sol_rank, UNACCEPTABLE)
    return PreferenceProfile.from_tables(
        left, right, r.tolist(), left_rank=ctx.sub_rank.tolist(), right_rank=rank.tolist()
    )


@dataclass(frozen=True)
class RepresentativeMap:
    """``association[i]``: closest subproblem of solution i.
    ``representative[j]``: best associated solution of subproblem j, or -1."""

    association: np.ndarray
    representative: np.ndarray


def representative_map(ctx: SelectionContext) -> RepresentativeMap:
    assoc = ctx.sol_top[:, 0]
    w = clamp_weights(ctx.weights[assoc])
    g = np.max(np.abs(ctx.raw - ctx.ideal) / w, axis=1)
    idx = np.arange(ctx.n_sol)
    order = np.lexsort((idx, g, assoc))
    rep = np.full(ctx.n_sub, -1, dtype=np.int64)
    sorted_assoc = assoc[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = sorted_assoc[1:] != sorted_assoc[:-1]
    rep[sorted_assoc[first]] = order[first]
    return RepresentativeMap(assoc.copy(), rep)


def adaptive_set_r(ctx: SelectionContext, solution_lists=None) -> np.ndarray:
    """Per-solution list lengths.

    Starting from m, a solution's list grows one subproblem at a time up to
    ``ell_max`` and stops just before the first subproblem whose
    representative the solution dominates.
    """
    m = ctx.m
    if ctx.ell_max < m:
        raise ContractViolation(f"ell_max={ctx.ell_max} is below m={m}")
    lists = ctx.sol_top if solution_lists is None else np.asarray(solution_lists)
    cap = min(ctx.list_cap, lists.shape[1])
    start = min(m, cap)
    r = np.full(ctx.n_sol, cap, dtype=np.int64)
    if cap <= start:
        r[:] = start
        return r
    rep = representative_map(ctx).representative
    t = rep[lists[:, start:cap]]  # (Q, cap - start)
    valid = t >= 0
    other = ctx.raw[np.where(valid, t, 0)]
    me = ctx.raw[:, None, :]
    dom = valid & np.all(me <= other, axis=2) & np.any(me < other, axis=2)
    hit = dom.any(axis=1)
    r[hit] = start + dom[hit].argmax(axis=1)
    return r


def _first_level(ctx: SelectionContext, r: np.ndarray, rng) -> Matching:
    """Incomplete-list matching.

    Subproblem lists are restricted to mutually acceptable pairs, which
    leaves the stable outcome unchanged and avoids sorting all Q solutions
    for every subproblem.
    """
    top = ctx.sol_top if r.max() <= ctx.list_cap else ctx.sol_order
    mask = np.arange(top.shape[1])[None, :] < r[:, None]
    ps = top[mask]
    xs = np.broadcast_to(np.arange(ctx.n_sol)[:, None], top.shape)[mask]
    vals = ctx.delta_p[ps, xs]
    order = np.lexsort((xs, vals, ps))
    flat = xs[order].tolist()
    bounds = np.concatenate(([0], np.cumsum(np.bincount(ps, minlength=ctx.n_sub)))).tolist()
    left = [flat[a:b] for a, b in zip(bounds[:-1], bounds[1:])]
    rows = top.tolist()
    right = [row[:k] for row, k in zip(rows, r.tolist())]
    right_rank = [{p: pos for pos, p in enumerate(row)} for row in right]
    profile = PreferenceProfile.from_tables(left, right, r.tolist(), right_rank=right_rank)
    return stable_match_incomplete(profile, rng)


def _second_level(ctx: SelectionContext, first: Matching, rng) -> Matching:
    matched_p = np.zeros(ctx.n_sub, dtype=bool)
    matched_x = np.zeros(ctx.n_sol, dtype=bool)
    for p, x in first.pairs:
        matched_p[p] = True
        matched_x[x] = True
    pu = np.flatnonzero(~matched_p)
    if len(pu) == 0:
        return first
    su = np.flatnonzero(~matched_x)
    # pu and su are ascending, so stable sorts keep ties by global index
    left = np.argsort(ctx.delta_p[np.ix_(pu, su)], axis=1, kind="stable")
    right = np.argsort(ctx.delta_x[np.ix_(su, pu)], axis=1, kind="stable")
    profile = PreferenceProfile.from_tables(
        left.tolist(), right.tolist(), [len(pu)] * len(su),
        right_rank=_inverse(right).tolist(),
    )
    second = stable_match_complete(profile, rng)
    pairs = set(first.pairs)
    pairs.update((int(pu[p]), int(su[x])) for p, x in second.pairs)
    return Matching(frozenset(pairs))


def selection_aoostm(ctx: SelectionContext, rng, lengths=None) -> Matching:
    """Two-level one-one selection: incomplete-list matching with adaptive
    list lengths, then complete-list matching of whatever is left over."""
    if ctx.n_sol < ctx.n_sub:
        raise ContractViolation(f"need at least {ctx.n_sub} solutions, got {ctx.n_sol}")
    r = adaptive_set_r(ctx) if lengths is None else _lengths_array(ctx, lengths)
    first = _first_level(ctx, r, rng)
    return _second_level(ctx, first, rng)


def selection_amostm(ctx: SelectionContext, rng, lengths=None) -> Matching:
    """Many-one selection with adaptive list lengths and a common quota of N."""
    if ctx.n_sol < ctx.n_sub:
        raise ContractViolation(f"need at least {ctx.n_sub} solutions, got {ctx.n_sol}")
    r = adaptive_set_r(ctx) if lengths is None else _lengths_array(ctx, lengths)
    top = ctx.sol_top if r.max() <= ctx.list_cap else ctx.sol_order
    right = [row[:k] for row, k in zip(top.tolist(), r.tolist())]
    left, left_rank = _listed_by(ctx, right)
    profile = PreferenceProfile.from_tables(left, right, r.tolist(), left_rank=left_rank)
    return many_one_match(profile, ctx.n_sub, rng)


def selection_stm(ctx: SelectionContext, rng) -> Matching:
    """One-one selection over complete lists."""
    if ctx.n_sol < ctx.n_sub:
        raise ContractViolation(f"need at least {ctx.n_sub} solutions, got {ctx.n_sol}")
    profile = PreferenceProfile.from_tables(
        ctx.sub_order.tolist(),
        ctx.sol_order.tolist(),
        [ctx.n_sub] * ctx.n_sol,
        right_rank=ctx.sol_rank.tolist(),
    )
    return stable_match_complete(profile, rng)


def selection_dra(ctx: SelectionContext, rng=None) -> Matching:
    """Each subproblem keeps its own best solution; solutions may repeat."""
    best = ctx.delta_p.argmin(axis=1)
    return Matching.from_pairs(enumerate(best.tolist()), many_one=True)


SELECTORS = {
    "aoostm": selection_aoostm,
    "amostm": selection_amostm,
    "stm": selection_stm,
    "dra": selection_dra,
}


def matched_counts(matching: Matching, n_sub: int) -> np.ndarray:
    counts = np.zeros(n_sub, dtype=np.int64)
    for p, _ in matching.pairs:
        counts[p] += 1
    return counts


def rank_lists(values: np.ndarray) -> list[list[int]]:
    """Row-wise ascending rankings with ties by index."""
    return np.argsort(np.asarray(values), axis=1, kind="stable").tolist()


__all__: Sequence[str] = [
    "SelectionContext", "RepresentativeMap", "build_preference_profile",
    "representative_map", "adaptive_set_r", "selection_aoostm", "selection_amostm",
    "selection_stm", "selection_dra", "SELECTORS", "matched_counts", "rank_lists",
]
