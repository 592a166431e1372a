"""Offspring operators: DE/rand/1 with binomial crossover, SBX and
polynomial mutation. Every operator clips its result to the box.

Operators accept a single vector or a (k, n) batch of rows; batches draw
their random numbers in one call per array so the draw order is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VariationParams:
    lower: np.ndarray
    upper: np.ndarray
    cr: float = 1.0
    f: float = 0.5
    pc: float = 1.0
    eta_c: float = 30.0
    pm: float | None = None  # None means 1/n
    eta_m: float = 20.0

    def __post_init__(self):
        for name in ("cr", "pc"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {val}")
        if self.pm is not None and not 0.0 <= self.pm <= 1.0:
            raise ValueError(f"pm must be in [0, 1], got {self.pm}")
        if not 0.0 <= self.f <= 2.0:
            raise ValueError(f"f must be in [0, 2], got {self.f}")
        if self.eta_c <= 0 or self.eta_m <= 0:
            raise ValueError("distribution indices must be positive")
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("bounds must have equal length and lower < upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def mutation_rate(self) -> float:
        return 1.0 / self.n if self.pm is None else self.pm

    def repair(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


def _check(params: VariationParams, *arrays) -> None:
    for a in arrays:
        if a.shape[-1] != params.n:
            raise ValueError(f"expected {params.n} variables, got shape {a.shape}")
    shapes = {a.shape for a in arrays}
    if len(shapes) > 1:
        raise ValueError(f"parent shapes differ: {sorted(shapes)}")


def de_rand_1(base, r2, r3, params: VariationParams, rng: np.random.Generator) -> np.ndarray:
    """``base + F (r2 - r3)`` with binomial crossover against ``base``.

    One coordinate per trial is always taken from the mutant.
    """
    base, r2, r3 = (np.asarray(a, dtype=float) for a in (base, r2, r3))
    _check(params, base, r2, r3)
    single = base.ndim == 1
    b, a2, a3 = (np.atleast_2d(a) for a in (base, r2, r3))
    k, n = b.shape
    mutant = b + params.f * (a2 - a3)
    take = rng.random((k, n)) < params.cr
    take[np.arange(k), rng.integers(0, n, size=k)] = True
    trial = params.repair(np.where(take, mutant, b))
    return trial[0] if single else trial


def sbx(p1, p2, params: VariationParams, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover. Each coordinate recombines with
    probability 1/2 once the pair is selected for crossover (rate ``pc``);
    both children share one spread factor per coordinate."""
    p1, p2 = (np.asarray(a, dtype=float) for a in (p1, p2))
    _check(params, p1, p2)
    single = p1.ndim == 1
    a, b = np.atleast_2d(p1), np.atleast_2d(p2)
    k, n = a.shape
    u = rng.random((k, n))
    swap = rng.random((k, n)) < 0.5
    cross = rng.random(k) < params.pc
    expo = 1.0 / (params.eta_c + 1.0)
    beta = np.where(u <= 0.5, (2.0 * u) ** expo, (1.0 / (2.0 * (1.0 - u))) ** expo)
    mean = 0.5 * (a + b)
    half = 0.5 * (b - a)
    c1 = mean - beta * half
    c2 = mean + beta * half
    active = cross[:, None] & swap & (np.abs(a - b) > 1e-14)
    c1 = params.repair(np.where(active, c1, a))
    c2 = params.repair(np.where(active, c2, b))
    if single:
        return c1[0], c2[0]
    return c1, c2


def poly_mutation(x, params: VariationParams, rng: np.random.Generator) -> np.ndarray:
    """Bounded polynomial mutation, each coordinate with probability ``pm``."""
    x = np.asarray(x, dtype=float)
    _check(params, x)
    single = x.ndim == 1
    y = np.atleast_2d(x).copy()
    k, n = y.shape
    lo, hi = params.lower, params.upper
    span = hi - lo
    hit = rng.random((k, n)) < params.mutation_rate
    u = rng.random((k, n))
    d1 = (y - lo) / span
    d2 = (hi - y) / span
    power = 1.0 / (params.eta_m + 1.0)
    left = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (params.eta_m + 1.0)
    right = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (params.eta_m + 1.0)
    delta = np.where(u < 0.5, left**power - 1.0, 1.0 - right**power)
    y = np.where(hit, y + delta * span, y)
    y = params.repair(y)
    return y[0] if single else y
