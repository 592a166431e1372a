from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ProblemError(ValueError):
    """Bad problem name, dimension, or decision vector."""


@dataclass(frozen=True)
class Problem:
    """A box-constrained benchmark instance.

    ``func`` maps a (k, n) array of decision vectors to (k, m) objectives.
    """

    name: str
    m: int
    n: int
    lower: np.ndarray
    upper: np.ndarray
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    wfg_k: int | None = None
    wfg_l: int | None = None

    def bounds(self) -> list[tuple[float, float]]:
        return [(float(lo), float(hi)) for lo, hi in zip(self.lower, self.upper)]

    def evaluate(self, x) -> np.ndarray:
        """Objectives of one vector (returns shape (m,)) or of a batch of rows."""
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        batch = np.atleast_2d(arr)
        if batch.ndim != 2 or batch.shape[1] != self.n:
            raise ProblemError(f"{self.name}: expected {self.n} variables, got shape {arr.shape}")
        tol = 1e-12 * np.maximum(1.0, np.abs(self.upper - self.lower))
        if np.any(batch < self.lower - tol) or np.any(batch > self.upper + tol):
            raise ProblemError(f"{self.name}: decision vector outside the box")
        out = self.func(np.clip(batch, self.lower, self.upper))
        return out[0] if single else out

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self.lower + rng.random((count, self.n)) * (self.upper - self.lower)


def dominates(a, b) -> bool:
    """Pareto dominance for minimization."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_mask(points: np.ndarray) -> np.ndarray:
    """Boolean mask of rows not dominated by any other row."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    keep = np.ones(n, dtype=bool)
    if pts.shape[1] == 2:
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        best = np.inf
        last_f1 = np.nan
        for idx in order.tolist():
            f1, f2 = pts[idx, 0], pts[idx, 1]
            if f2 < best:
                best, last_f1 = f2, f1
            elif not (f2 == best and f1 == last_f1):
                # exact duplicates of a kept point sort next to it and stay
                keep[idx] = False
        return keep
    # in lexicographic order a point can only be dominated by an earlier one,
    # and if it is, then also by an earlier non-dominated one
    order = np.lexsort(pts.T[::-1])
    front = np.empty_like(pts)
    size = 0
    for idx in order.tolist():
        p = pts[idx]
        if size:
            head = front[:size]
            le = np.all(head <= p, axis=1) & np.any(head < p, axis=1)
            if le.any():
                keep[idx] = False
                continue
        front[size] = p
        size += 1
    return keep
