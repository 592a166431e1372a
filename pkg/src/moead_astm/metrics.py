"""IGD and hypervolume."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .problems import nondominated_mask

MC_SAMPLES = 1_000_000
MC_SEED = 20_240_101
DEFAULT_REFERENCE = 1.2


@dataclass(frozen=True)
class MetricConfig:
    reference: float | np.ndarray = DEFAULT_REFERENCE
    normalize: bool = False
    mc_samples: int = MC_SAMPLES
    mc_seed: int = MC_SEED


def _as_points(points, name: str) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty set of objective vectors")
    return arr


def igd(population, front) -> float:
    """Mean distance from each front sample to its nearest population point."""
    pop = _as_points(population, "population")
    ref = _as_points(front, "front sample")
    if pop.shape[1] != ref.shape[1]:
        raise ValueError(f"objective counts differ: {pop.shape[1]} vs {ref.shape[1]}")
    dist, _ = cKDTree(pop).query(ref, k=1)
    return float(np.mean(dist))


def _hv2(points: np.ndarray, ref: np.ndarray) -> float:
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    total = 0.0
    r1 = float(ref[0])
    best = float(ref[1])
    for f1, f2 in pts.tolist():
        if f2 < best:
            total += (r1 - f1) * (best - f2)
            best = f2
    return total


def _hv3(points: np.ndarray, ref: np.ndarray) -> float:
    """Slices along the third objective; each slab is a 2-D problem."""
    pts = points[np.argsort(points[:, 2], kind="stable")]
    z = pts[:, 2].tolist() + [float(ref[2])]
    total = 0.0
    for k in range(len(pts)):
        depth = z[k + 1] - z[k]
        if depth <= 0:
            continue
        total += depth * _hv2(pts[: k + 1, :2], ref[:2])
    return total


def _hv_mc(points: np.ndarray, ref: np.ndarray, samples: int, seed: int) -> float:
    lo = points.min(axis=0)
    box = np.prod(ref - lo)
    rng = np.random.default_rng(seed)
    hit = 0
    chunk = 50_000
    done = 0
    while done < samples:
        k = min(chunk, samples - done)
        u = lo + rng.random((k, len(ref))) * (ref - lo)
        covered = np.zeros(k, dtype=bool)
        for p in points:
            covered |= np.all(u >= p, axis=1)
        hit += int(covered.sum())
        done += k
    return float(box * hit / samples)


def hv(population, reference=DEFAULT_REFERENCE, *, mc_samples: int = MC_SAMPLES,
       mc_seed: int = MC_SEED) -> float:
    """Volume dominated by the population and bounded by ``reference``.

    Points not strictly better than the reference in every objective, and
    dominated points, are dropped first. Exact for up to three objectives,
    Monte Carlo beyond.
    """
    pts = _as_points(population, "population")
    m = pts.shape[1]
    ref = np.broadcast_to(np.asarray(reference, dtype=float), (m,)).copy()
    pts = pts[np.all(pts < ref, axis=1)]
    if len(pts) == 0:
        return 0.0
    pts = np.unique(pts[nondominated_mask(pts)], axis=0)
    if m == 2:
        return float(_hv2(pts, ref))
    if m == 3:
        return float(_hv3(pts, ref))
    return _hv_mc(pts, ref, mc_samples, mc_seed)


def normalize_for_metrics(points, front_min, front_max) -> np.ndarray:
    """Affine map sending the front's bounds to [0, 1] per objective; an
    objective with zero range maps to 0. No clamping."""
    pts = np.asarray(points, dtype=float)
    lo = np.asarray(front_min, dtype=float)
    span = np.asarray(front_max, dtype=float) - lo
    safe = np.where(span > 0, span, 1.0)
    out = (pts - lo) / safe
    return np.where(span > 0, out, 0.0)


def score(population, front, *, normalize: bool = False,
          reference=DEFAULT_REFERENCE) -> dict:
    """IGD and HV of a population against a front sample.

    With ``normalize`` both sets are first mapped by the front's bounds.
    """
    pop = _as_points(population, "population")
    pf = _as_points(front, "front sample")
    if normalize:
        lo, hi = pf.min(axis=0), pf.max(axis=0)
        pop = normalize_for_metrics(pop, lo, hi)
        pf = normalize_for_metrics(pf, lo, hi)
    return {"igd": igd(pop, pf), "hv": hv(pop, reference)}
