"""Pareto-front samples for the benchmark instances."""

from __future__ import annotations

import csv
from functools import lru_cache
from pathlib import Path

import numpy as np

from .base import Problem, nondominated_mask
from . import wfg

PI = np.pi

METRIC_SAMPLE_SIZE = {2: 1000, 3: 10000}


def _spread_2d(points: np.ndarray, count: int) -> np.ndarray:
    """Pick ``count`` points spaced evenly by arc length along a sorted curve.

    Gaps between disconnected pieces do not count toward the length.
    """
    pts = points[np.argsort(points[:, 0], kind="stable")]
    if count >= len(pts):
        return pts
    if count == 1:
        return pts[len(pts) // 2 : len(pts) // 2 + 1]
    step = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    typical = np.median(step) if len(step) else 0.0
    step = np.where(step > 50 * typical + 1e-12, 0.0, step)
    s = np.concatenate([[0.0], np.cumsum(step)])
    if s[-1] == 0.0:
        idx = np.linspace(0, len(pts) - 1, count).round().astype(int)
        return pts[idx]
    targets = np.linspace(0.0, s[-1], count)
    idx = np.searchsorted(s, targets).clip(0, len(pts) - 1)
    # neighbours in s can be equal across gaps; keep unique, top up if needed
    idx = np.unique(idx)
    if len(idx) < count:
        rest = np.setdiff1d(np.arange(len(pts)), idx)
        fill = rest[np.linspace(0, len(rest) - 1, count - len(idx)).round().astype(int)]
        idx = np.sort(np.concatenate([idx, fill]))
    return pts[idx]


def _curve(f1_fn, f2_fn, count, lo=0.0, hi=1.0, dense=20):
    t = np.linspace(lo, hi, max(count * dense, 2))
    pts = np.column_stack([f1_fn(t), f2_fn(t)])
    pts = pts[nondominated_mask(pts)]
    return _spread_2d(pts, count)


def _segments(pieces, count):
    """Points on f2 = 1 - f1 restricted to the union of [a, b] pieces,
    allotted by piece length; zero-length pieces get one point."""
    total = sum(b - a for a, b in pieces)
    points = [np.array([[a, 1 - a]]) for a, b in pieces if b == a]
    budget = count - len(points)
    spans = [(a, b) for a, b in pieces if b > a]
    alloc = [max(1, int(round(budget * (b - a) / total))) for a, b in spans]
    alloc[-1] = max(1, budget - sum(alloc[:-1]))
    for (a, b), c in zip(spans, alloc):
        f1 = np.linspace(a, b, c) if c > 1 else np.array([(a + b) / 2])
        points.append(np.column_stack([f1, 1 - f1]))
    pts = np.vstack(points)
    return pts[np.argsort(pts[:, 0], kind="stable")]


def _simplex_grid(count: int) -> np.ndarray:
    """About ``count`` (and at least ``count``) lattice points on the 3-simplex."""
    h = 1
    while (h + 1) * (h + 2) // 2 < count:
        h += 1
    i, j = np.meshgrid(np.arange(h + 1), np.arange(h + 1), indexing="ij")
    mask = i + j <= h
    a = i[mask] / h
    b = j[mask] / h
    return np.column_stack([a, b, 1 - a - b])


def _thin(points: np.ndarray, count: int, rng_seed: int = 0) -> np.ndarray:
    if len(points) <= count:
        return points
    # farthest-point thinning would be nicer; a fixed stride keeps it cheap
    idx = np.linspace(0, len(points) - 1, count).round().astype(int)
    return points[idx]


def _sphere_points(count: int) -> np.ndarray:
    s = _simplex_grid(count)
    pts = s / np.linalg.norm(s, axis=1, keepdims=True)
    return _thin(pts, count)


def _uf9_points(count: int) -> np.ndarray:
    pts = _simplex_grid(int(count * 1.6))
    f1, f3 = pts[:, 0], pts[:, 2]
    keep = (f1 <= 0.25 * (1 - f3) + 1e-12) | (f1 >= 0.75 * (1 - f3) - 1e-12)
    return _thin(pts[keep], count)


def _wfg_points(problem: Problem, count: int) -> np.ndarray:
    name, m = problem.name, problem.m
    if m == 2 and name != "WFG2":
        return wfg.front_shape(name, np.linspace(0.0, 1.0, count)[:, None])
    if m == 2:
        t = np.linspace(0.0, 1.0, count * 20)[:, None]
        pts = wfg.front_shape(name, t)
        pts = pts[nondominated_mask(pts)]
        return _spread_2d(pts, count)
    if name == "WFG3":
        # degenerate: a line segment through the objective space
        t = np.linspace(0.0, 1.0, count)[:, None]
        x = np.hstack([t, np.full((count, m - 2), 0.5)])
        return wfg.front_shape(name, x)
    if m == 3:
        side = int(np.ceil(np.sqrt(count * (2.5 if name == "WFG2" else 1.2))))
        g = np.linspace(0.0, 1.0, side)
        x = np.array(np.meshgrid(g, g, indexing="ij")).reshape(2, -1).T
        pts = wfg.front_shape(name, x)
        # the mixed WFG1 front is monotone, so only the disconnected one needs filtering
        if name == "WFG2":
            pts = pts[nondominated_mask(pts)]
        return _thin(pts, count)
    rng = np.random.default_rng(12345)
    x = rng.random((count, m - 1))
    pts = wfg.front_shape(name, x)
    if name == "WFG2":
        pts = pts[nondominated_mask(pts)]
    return pts


def sample_pf(problem: Problem, count: int) -> np.ndarray:
    """``count`` points spread over the analytic front (fewer only where a
    front has fewer distinct optimal points, e.g. UF5)."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    name = problem.name
    sqrt = np.sqrt
    u = np.linspace(0.0, 1.0, count) if count > 1 else np.array([0.5])
    # connected curves: uniform grid over a parameter u that keeps spacing
    # roughly even along the curve
    if name in ("UF1", "UF2", "UF3", "MOP1", "MOP5"):
        return np.column_stack([u**2, 1 - u])
    if name in ("UF4", "MOP2"):
        return np.column_stack([u, 1 - u**2])
    if name == "UF7":
        return np.column_stack([u, 1 - u])
    if name == "MOP3":
        return np.column_stack([np.cos(0.5 * PI * u), np.sin(0.5 * PI * u)])[::-1]
    if name == "MOP4":
        return _curve(lambda t: t, lambda t: 1 - sqrt(t) * np.cos(2 * PI * t) ** 2, count, dense=200)
    if name == "UF5":
        parts = 10
        f1 = np.arange(2 * parts + 1) / (2 * parts)
        pts = np.column_stack([f1, 1 - f1])
        if count >= len(pts):
            return pts
        return pts[np.linspace(0, len(pts) - 1, count).round().astype(int)]
    if name == "UF6":
        if count == 1:
            return np.array([[0.0, 1.0]])
        return _segments([(0.0, 0.0), (0.25, 0.5), (0.75, 1.0)], count)
    if name in ("UF8", "UF10", "MOP7"):
        return _sphere_points(count)
    if name == "MOP6":
        return _thin(_simplex_grid(count), count)
    if name == "UF9":
        return _uf9_points(count)
    if name.startswith("WFG"):
        return _wfg_points(problem, count)
    raise ValueError(f"no front sampler for {name}")


@lru_cache(maxsize=64)
def _cached(name: str, m: int, count: int) -> np.ndarray:
    from . import get_problem

    pts = sample_pf(get_problem(name, m=m), count)
    pts.setflags(write=False)
    return pts


def metric_front(problem: Problem) -> np.ndarray:
    """The reference sample used for IGD (1,000 points for two objectives,
    10,000 for three; cached per problem)."""
    count = METRIC_SAMPLE_SIZE.get(problem.m, 10000)
    return _cached(problem.name, problem.m, count)


def write_points(path, points) -> None:
    """One point per line, comma-separated, shortest round-trip floats."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(points, dtype=float):
            writer.writerow([repr(float(v)) for v in row])


def read_points(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    return np.asarray(rows, dtype=float)
