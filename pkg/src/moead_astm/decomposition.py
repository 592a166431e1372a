"""Weight vectors, neighborhoods, scalarizing functions and normalization."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

WEIGHT_FLOOR = 1e-6
INTERCEPT_FLOOR = 1e-6

# Population sizes that need more than one lattice layer: m -> layers.
LAYERED_SIZES = {
    (8, 156): (3, 2),
    (10, 275): (3, 2),
}
INNER_SHRINK = 0.5


def _compositions(m: int, h: int):
    if m == 1:
        yield (h,)
        return
    for first in range(h + 1):
        for rest in _compositions(m - 1, h - first):
            yield (first,) + rest


def simplex_lattice(m: int, h: int) -> np.ndarray:
    """All points of the simplex with coordinates in {0, 1/h, ..., 1},
    in lexicographic order (for m = 2: (0, 1), (1/h, 1 - 1/h), ...)."""
    if m < 1 or h < 1:
        raise ValueError(f"need m >= 1 and h >= 1, got m={m}, h={h}")
    return np.array(list(_compositions(m, h)), dtype=float) / h


def generate_weights(m: int, layers: Sequence[int]) -> np.ndarray:
    """Simplex-lattice weights; extra layers are shrunk toward the centroid."""
    if m < 2:
        raise ValueError(f"need at least two objectives, got {m}")
    if not layers:
        raise ValueError("need at least one lattice layer")
    blocks = [simplex_lattice(m, layers[0])]
    centroid = np.full(m, 1.0 / m)
    for h in layers[1:]:
        inner = simplex_lattice(m, h)
        blocks.append(centroid + INNER_SHRINK * (inner - centroid))
    return np.vstack(blocks)


def lattice_size(m: int, h: int) -> int:
    return comb(h + m - 1, m - 1)


def weights_for_population(m: int, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Exactly ``n`` weight vectors for ``m`` objectives.

    Uses a single lattice when one has exactly ``n`` points, the two-layer
    table for the many-objective sizes, and otherwise the largest lattice
    below ``n`` padded with uniform simplex samples drawn from ``rng``.
    """
    if n < 1:
        raise ValueError(f"population size must be positive, got {n}")
    if (m, n) in LAYERED_SIZES:
        return generate_weights(m, LAYERED_SIZES[(m, n)])
    h = 1
    while lattice_size(m, h + 1) <= n:
        h += 1
    if lattice_size(m, h) > n:
        # n < m: no lattice fits, use the axis vectors we can
        base = np.eye(m)[:n]
        return base
    w = generate_weights(m, [h])
    missing = n - len(w)
    if missing:
        if rng is None:
            raise ValueError(
                f"no {m}-objective lattice has {n} points; an rng is needed for padding"
            )
        extra = rng.dirichlet(np.ones(m), size=missing)
        w = np.vstack([w, extra])
    return w


def clamp_weights(weights: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(weights, dtype=float), WEIGHT_FLOOR)


def build_neighborhoods(weights: np.ndarray, t: int) -> np.ndarray:
    """Indices of the ``t`` nearest weight vectors of each weight (self first)."""
    weights = np.asarray(weights, dtype=float)
    n = len(weights)
    if not 1 <= t <= n:
        raise ValueError(f"neighborhood size {t} outside [1, {n}]")
    d = np.linalg.norm(weights[:, None, :] - weights[None, :, :], axis=2)
    order = np.argsort(d, axis=1, kind="stable")
    # a duplicated weight could sort ahead of self; put self first explicitly
    out = np.empty((n, t), dtype=np.int64)
    for i in range(n):
        row = order[i]
        if row[0] != i:
            row = np.concatenate(([i], row[row != i]))
        out[i] = row[:t]
    return out


def tch(objectives, weight, ideal) -> np.ndarray | float:
    """Inverted Tchebycheff value ``max_i |f_i - z_i| / w_i``.

    Broadcasts: ``objectives`` (..., m) against ``weight`` (..., m).
    """
    f = np.asarray(objectives, dtype=float)
    w = clamp_weights(weight)
    val = np.max(np.abs(f - np.asarray(ideal, dtype=float)) / w, axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def tch_matrix(objectives: np.ndarray, weights: np.ndarray, ideal) -> np.ndarray:
    """``out[j, i]`` = tch of solution ``i`` on weight ``j``."""
    diff = np.abs(np.asarray(objectives, dtype=float) - np.asarray(ideal, dtype=float))
    inv = 1.0 / clamp_weights(weights)
    return np.max(inv[:, None, :] * diff[None, :, :], axis=2)


def perp_distance(normalized, weight) -> np.ndarray | float:
    """Distance from ``normalized`` to the ray spanned by ``weight``."""
    f = np.asarray(normalized, dtype=float)
    w = np.asarray(weight, dtype=float)
    scale = np.sum(w * f, axis=-1, keepdims=True) / np.sum(w * w, axis=-1, keepdims=True)
    val = np.linalg.norm(f - scale * w, axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def perp_distance_matrix(normalized: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``out[i, j]`` = perpendicular distance of solution ``i`` to weight ``j``."""
    f = np.asarray(normalized, dtype=float)
    w = np.asarray(weights, dtype=float)
    unit = w / np.linalg.norm(w, axis=1, keepdims=True)
    proj = f @ unit.T
    # explicit residual; |f|^2 - proj^2 cancels badly near the ray
    out = np.zeros_like(proj)
    for k in range(f.shape[1]):
        out += (f[:, k:k + 1] - proj * unit[:, k]) ** 2
    return np.sqrt(out)


@dataclass
class NormalizationContext:
    """Running ideal point and the latest intercepts."""

    ideal: np.ndarray
    intercepts: np.ndarray = field(default=None)

    @classmethod
    def fresh(cls, m: int) -> "NormalizationContext":
        return cls(np.full(m, np.inf), np.ones(m))

    def copy(self) -> "NormalizationContext":
        return NormalizationContext(self.ideal.copy(), self.intercepts.copy())


def update_ideal(ctx: NormalizationContext, objectives) -> NormalizationContext:
    """Fold one vector (or a batch of rows) into the ideal point, in place."""
    f = np.atleast_2d(np.asarray(objectives, dtype=float))
    np.minimum(ctx.ideal, f.min(axis=0), out=ctx.ideal)
    return ctx


def _intercepts(translated: np.ndarray) -> np.ndarray:
    m = translated.shape[1]
    fallback = np.maximum(translated.max(axis=0), INTERCEPT_FLOOR)
    # extreme point of axis k minimizes the achievement scalarizing function
    asf_w = np.full((m, m), WEIGHT_FLOOR)
    np.fill_diagonal(asf_w, 1.0)
    asf = np.max(translated[None, :, :] / asf_w[:, None, :], axis=2)
    extremes = translated[np.argmin(asf, axis=1)]
    try:
        with np.errstate(all="ignore"):
            plane = np.linalg.solve(extremes, np.ones(m))
            icpt = 1.0 / plane
    except np.linalg.LinAlgError:
        return fallback
    if not np.all(np.isfinite(icpt)) or np.any(icpt < INTERCEPT_FLOOR):
        return fallback
    return icpt


def normalize(objectives, ctx: NormalizationContext) -> tuple[np.ndarray, NormalizationContext]:
    """Translate by the ideal point and divide by hyperplane intercepts.

    The ideal point is folded with ``objectives`` first. Intercepts come
    from the extreme points of the translated set; when the hyperplane is
    degenerate each objective's span ``max - ideal`` is used instead.
    """
    f = np.atleast_2d(np.asarray(objectives, dtype=float))
    if f.shape[0] == 0:
        raise ValueError("cannot normalize an empty population")
    update_ideal(ctx, f)
    translated = f - ctx.ideal
    ctx.intercepts = _intercepts(translated)
    return translated / ctx.intercepts, ctx
