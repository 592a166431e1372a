"""Two-sided matching engines.

Left agents propose (subproblems in the one-one engines), right agents hold
offers. Preference lists are strict rankings over indices of the other side.
Only the first ``right_lengths[x]`` entries of a right agent's list are
acceptable to it; a left agent finds acceptable exactly the agents on its list.

Nothing here knows about optimization; the selection module builds the
profiles from objective vectors.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

UNACCEPTABLE = np.iinfo(np.int64).max


class ContractViolation(ValueError):
    """Raised when an input breaks an engine's preconditions."""


class _Picker:
    """Uniform index draws from a seeded generator, buffered for speed."""

    def __init__(self, rng: np.random.Generator, chunk: int = 512):
        self._rng = rng
        self._chunk = chunk
        self._buf: list[float] = []
        self._pos = 0

    def random(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._rng.random(self._chunk).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def __call__(self, k: int) -> int:
        """An index in ``range(k)``."""
        return int(self.random() * k)

    def distinct(self, k: int, size: int) -> list[int]:
        """``size`` distinct indices from ``range(k)`` (``size <= k``), in
        draw order; a partial Fisher-Yates shuffle over a virtual array."""
        swapped: dict[int, int] = {}
        out = []
        for i in range(size):
            j = i + self(k - i)
            out.append(swapped.get(j, j))
            swapped[j] = swapped.get(i, i)
        return out


@dataclass(frozen=True)
class PreferenceProfile:
    """Ranked preference lists of both sides.

    ``left_lists[p]`` ranks right agents for left agent ``p``;
    ``right_lists[x]`` ranks left agents for right agent ``x`` and only its
    first ``right_lengths[x]`` entries are acceptable.
    """

    left_lists: Sequence[Sequence[int]]
    right_lists: Sequence[Sequence[int]]
    right_lengths: Sequence[int]
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.check:
            self.validate()

    @classmethod
    def from_tables(cls, left_lists, right_lists, right_lengths, *,
                    left_rank=None, right_rank=None) -> "PreferenceProfile":
        """Build without validation, optionally with precomputed rank tables.

        For callers that construct consistent lists themselves; the tables
        must match what the lazy properties would compute.
        """
        profile = cls(left_lists, right_lists, right_lengths, check=False)
        if left_rank is not None:
            profile.__dict__["left_rank"] = left_rank
        if right_rank is not None:
            profile.__dict__["right_rank"] = right_rank
        return profile

    @property
    def n_left(self) -> int:
        return len(self.left_lists)

    @property
    def n_right(self) -> int:
        return len(self.right_lists)

    @property
    def is_complete(self) -> bool:
        return all(len(lst) == self.n_right for lst in self.left_lists) and all(
            r == self.n_left and len(lst) == self.n_left
            for r, lst in zip(self.right_lengths, self.right_lists)
        )

    def validate(self) -> None:
        n_left, n_right = self.n_left, self.n_right
        if len(self.right_lengths) != n_right:
            raise ContractViolation(
                f"expected {n_right} right lengths, got {len(self.right_lengths)}"
            )
        for p, lst in enumerate(self.left_lists):
            _check_ranking(lst, n_right, f"left list {p}")
        for x, lst in enumerate(self.right_lists):
            _check_ranking(lst, n_left, f"right list {x}")
            r = self.right_lengths[x]
            if not 0 < r <= n_left:
                raise ContractViolation(f"right length {r} of agent {x} outside (0, {n_left}]")
            if r > len(lst):
                raise ContractViolation(
                    f"right length {r} of agent {x} exceeds its list length {len(lst)}"
                )

    @cached_property
    def right_rank(self) -> list[list[int]]:
        """``right_rank[x][p]``: position of ``p`` on ``x``'s acceptable prefix."""
        table = [[UNACCEPTABLE] * self.n_left for _ in range(self.n_right)]
        for x, lst in enumerate(self.right_lists):
            row = table[x]
            for pos in range(self.right_lengths[x]):
                row[lst[pos]] = pos
        return table

    @cached_property
    def left_rank(self) -> list[list[int]]:
        """``left_rank[p][x]``: position of ``x`` on ``p``'s list."""
        table = [[UNACCEPTABLE] * self.n_right for _ in range(self.n_left)]
        for p, lst in enumerate(self.left_lists):
            row = table[p]
            for pos, x in enumerate(lst):
                row[x] = pos
        return table

    def acceptable(self, p: int, x: int) -> bool:
        return (
            self.right_rank[x][p] != UNACCEPTABLE
            and self.left_rank[p][x] != UNACCEPTABLE
        )


def _check_ranking(lst: Sequence[int], bound: int, what: str) -> None:
    seen = set()
    for v in lst:
        if not 0 <= v < bound:
            raise ContractViolation(f"{what}: index {v} out of range [0, {bound})")
        if v in seen:
            raise ContractViolation(f"{what}: duplicate index {v}")
        seen.add(v)


@dataclass(frozen=True)
class Matching:
    """A set of (left, right) pairs."""

    pairs: frozenset[tuple[int, int]]
    many_one: bool = False

    @classmethod
    def from_pairs(cls, pairs, many_one: bool = False) -> "Matching":
        return cls(frozenset((int(p), int(x)) for p, x in pairs), many_one)

    def __len__(self) -> int:
        return len(self.pairs)

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def partner_of_right(self) -> dict[int, int]:
        return {x: p for p, x in self.pairs}

    def rights_of_left(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for p, x in sorted(self.pairs):
            out.setdefault(p, []).append(x)
        return out


@dataclass
class ProposalState:
    """Mutable state of a left-proposing deferred acceptance run.

    ``holder[x]`` is the left agent currently held by right agent ``x``
    (-1 if none). ``unmatched`` keeps the pick order of free left agents.
    """

    unmatched: list[int]
    holder: list[int]
    proposals: int = 0

    @classmethod
    def fresh(cls, profile: PreferenceProfile) -> "ProposalState":
        return cls(list(range(profile.n_left)), [-1] * profile.n_right)

    def matching(self) -> Matching:
        return Matching.from_pairs((p, x) for x, p in enumerate(self.holder) if p >= 0)


def deferred_acceptance_step(
    p: int, x: int, state: ProposalState, profile: PreferenceProfile
) -> ProposalState:
    """Left agent ``p`` proposes to right agent ``x``.

    The state is updated in place and returned.
    """
    if not 0 <= p < profile.n_left or not 0 <= x < profile.n_right:
        raise ContractViolation(f"pair ({p}, {x}) out of range")
    if p not in state.unmatched:
        raise ContractViolation(f"left agent {p} is not unmatched")
    rank = profile.right_rank[x]
    if rank[p] == UNACCEPTABLE:
        raise ContractViolation(f"left agent {p} is not acceptable to {x}")
    state.proposals += 1
    current = state.holder[x]
    if current < 0:
        state.holder[x] = p
        state.unmatched.remove(p)
    elif rank[p] < rank[current]:
        state.holder[x] = p
        state.unmatched[state.unmatched.index(p)] = current
    return state


def _left_proposing(profile: PreferenceProfile, rng: np.random.Generator) -> tuple[Matching, int]:
    left = profile.left_lists
    rank = profile.right_rank
    holder = [-1] * profile.n_right
    nxt = [0] * profile.n_left
    free = list(range(profile.n_left))
    pick = _Picker(rng)
    proposals = 0
    while free:
        k = pick(len(free))
        p = free[k]
        lst = left[p]
        i = nxt[p]
        if i == len(lst):
            free[k] = free[-1]
            free.pop()
            continue
        x = lst[i]
        nxt[p] = i + 1
        proposals += 1
        rk = rank[x][p]
        if rk == UNACCEPTABLE:
            continue
        q = holder[x]
        if q < 0:
            holder[x] = p
            free[k] = free[-1]
            free.pop()
        elif rk < rank[x][q]:
            holder[x] = p
            free[k] = q
    pairs = frozenset((p, x) for x, p in enumerate(holder) if p >= 0)
    return Matching(pairs), proposals


def stable_match_complete(profile: PreferenceProfile, rng: np.random.Generator) -> Matching:
    """Classic one-one deferred acceptance over complete lists.

    Every left agent ends up matched because there are at least as many
    right agents and every pair is acceptable.
    """
    if not profile.is_complete:
        raise ContractViolation("stable_match_complete requires complete preference lists")
    if profile.n_left > profile.n_right:
        raise ContractViolation(
            f"more left agents ({profile.n_left}) than right agents ({profile.n_right})"
        )
    return _left_proposing(profile, rng)[0]


def stable_match_incomplete(profile: PreferenceProfile, rng: np.random.Generator) -> Matching:
    """One-one deferred acceptance where proposals outside a right agent's
    acceptable prefix are skipped. Left agents that exhaust their lists stay
    unmatched."""
    return _left_proposing(profile, rng)[0]


def count_proposals(profile: PreferenceProfile, rng: np.random.Generator) -> int:
    """Proposal steps taken by the one-one engine (bounded by total list length)."""
    return _left_proposing(profile, rng)[1]


def many_one_match(
    profile: PreferenceProfile,
    quota: int,
    rng: np.random.Generator,
    *,
    return_steps: bool = False,
):
    """Right-proposing admission with one quota shared by all left agents.

    Each right agent proposes down its acceptable prefix and is tentatively
    accepted. Whenever the total number of pairs exceeds ``quota``, the left
    agent with the largest load (ties: the one whose worst held agent sits
    lowest on its list, then random) releases its worst held agent, which
    resumes proposing.
    """
    if quota < 1:
        raise ContractViolation(f"quota must be >= 1, got {quota}")
    n_left = profile.n_left
    rrank_lists = profile.right_lists
    lengths = profile.right_lengths
    lrank = profile.left_rank
    pick = _Picker(rng)

    held: list[list[int]] = [[] for _ in range(n_left)]
    worst = [-1] * n_left  # rank of the worst held agent, -1 if none
    # left agents grouped by (load, worst rank); per load a lazy max-heap
    # of worst ranks so the release candidates are found without a scan
    groups: dict[tuple[int, int], set[int]] = {(0, -1): set(range(n_left))}
    heaps: dict[int, list[int]] = {}
    count = {0: n_left}
    max_load = 0
    nxt = [0] * profile.n_right
    free = list(range(profile.n_right))
    size = 0
    steps = 0

    def move(q: int, old_load: int, new_load: int, new_worst: int) -> None:
        groups[(old_load, worst[q])].discard(q)
        count[old_load] -= 1
        count[new_load] = count.get(new_load, 0) + 1
        worst[q] = new_worst
        key = (new_load, new_worst)
        if key not in groups:
            groups[key] = set()
        groups[key].add(q)
        heapq.heappush(heaps.setdefault(new_load, []), -new_worst)

    while free:
        k = pick(len(free))
        x = free[k]
        i = nxt[x]
        if i == lengths[x]:
            free[k] = free[-1]
            free.pop()
            continue
        p = rrank_lists[x][i]
        nxt[x] = i + 1
        steps += 1
        load = len(held[p])
        held[p].append(x)
        move(p, load, load + 1, max(worst[p], lrank[p][x]))
        if load + 1 > max_load:
            max_load = load + 1
        free[k] = free[-1]
        free.pop()
        size += 1
        if size <= quota:
            continue

        heap = heaps[max_load]
        while not groups.get((max_load, -heap[0])):
            heapq.heappop(heap)
        candidates = sorted(groups[(max_load, -heap[0])])
        q = candidates[pick(len(candidates))] if len(candidates) > 1 else candidates[0]
        hq = held[q]
        rq = lrank[q]
        j = max(range(len(hq)), key=lambda t: rq[hq[t]])
        released = hq.pop(j)
        move(q, max_load, max_load - 1, max((rq[y] for y in hq), default=-1))
        if count[max_load] == 0:
            max_load -= 1
        size -= 1
        free.append(released)

    pairs = frozenset((p, x) for p in range(n_left) for x in held[p])
    matching = Matching(pairs, many_one=True)
    if return_steps:
        return matching, steps
    return matching


def verify_stability(
    profile: PreferenceProfile,
    matching: Matching,
    mode: str = "one-one",
    quota: int | None = None,
) -> list[tuple[int, int]]:
    """Return every blocking pair of ``matching`` (empty iff stable).

    one-one: an acceptable unmatched pair where each side is free or prefers
    the other to its partner. many-one: an acceptable unmatched pair where the
    right agent is free or prefers the left one, and either the common quota
    is not met or the left agent prefers the right one to one of its holdings.
    """
    if mode not in ("one-one", "many-one"):
        raise ContractViolation(f"unknown stability mode {mode!r}")
    if mode == "many-one" and quota is None:
        raise ContractViolation("many-one stability needs a quota")
    lrank = profile.left_rank
    rrank = profile.right_rank
    partner = matching.partner_of_right()
    holdings = matching.rights_of_left()
    worst_held = {p: max(lrank[p][x] for x in xs) for p, xs in holdings.items()}
    quota_open = mode == "many-one" and len(matching) < quota

    blocking = []
    for p in range(profile.n_left):
        lp = lrank[p]
        mine = holdings.get(p, [])
        for x in range(profile.n_right):
            if lp[x] == UNACCEPTABLE or rrank[x][p] == UNACCEPTABLE:
                continue
            q = partner.get(x, -1)
            if q == p:
                continue
            if q >= 0 and rrank[x][q] <= rrank[x][p]:
                continue
            if mode == "one-one":
                left_wants = not mine or lp[x] < lp[mine[0]]
            else:
                left_wants = quota_open or (bool(mine) and lp[x] < worst_held[p])
            if left_wants:
                blocking.append((p, x))
    return blocking


def greedy_assignment(profile: PreferenceProfile) -> Matching:
    """Each left agent takes the first entry of its own list, ignoring the
    right side entirely; right agents may be shared."""
    return Matching.from_pairs(
        ((p, lst[0]) for p, lst in enumerate(profile.left_lists) if lst), many_one=True
    )
