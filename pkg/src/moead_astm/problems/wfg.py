"""WFG1-WFG9, scalable in the number of objectives.

Decision variable i (1-based) lives in [0, 2i]. The first ``k`` variables
are position-related, the remaining ``l`` distance-related. Each problem is
a chain of transformations on the scaled vector ``z_i / (2i)`` followed by a
shape function per objective; objective i is scaled by ``2i``.
"""

from __future__ import annotations

import numpy as np

PI = np.pi
_EPS = 1e-10


def _to_unit(y):
    # transformations can overshoot [0, 1] by rounding error
    return np.clip(y, 0.0, 1.0)


# ---- bias -----------------------------------------------------------------

def b_poly(y, alpha):
    return _to_unit(y**alpha)


def b_flat(y, a, b, c):
    low = np.minimum(0.0, np.floor(y - b)) * a * (b - y) / b
    high = np.minimum(0.0, np.floor(c - y)) * (1 - a) * (y - c) / (1 - c)
    return _to_unit(a + low - high)


def b_param(y, u, a, b, c):
    v = a - (1 - 2 * u) * np.abs(np.floor(0.5 - u) + a)
    return _to_unit(y ** (b + (c - b) * v))


# ---- shift ----------------------------------------------------------------

def s_linear(y, a):
    return _to_unit(np.abs(y - a) / np.abs(np.floor(a - y) + a))


def s_decept(y, a, b, c):
    left = np.floor(y - a + b) * (1 - c + (a - b) / b) / (a - b)
    right = np.floor(a + b - y) * (1 - c + (1 - a - b) / b) / (1 - a - b)
    return _to_unit(1 + (np.abs(y - a) - b) * (left + right + 1 / b))


def s_multi(y, a, b, c):
    frac = np.abs(y - c) / (2 * (np.floor(c - y) + c))
    wave = np.cos((4 * a + 2) * PI * (0.5 - frac))
    return _to_unit((1 + wave + 4 * b * frac**2) / (b + 2))


# ---- reduction --------------------------------------------------------------

def r_sum(y, w):
    w = np.asarray(w, dtype=float)
    return _to_unit((y * w).sum(axis=1) / w.sum())


def r_nonsep(y, a):
    size = y.shape[1]
    total = y.sum(axis=1).copy()
    for k in range(a - 1):
        total += np.abs(y - np.roll(y, -(k + 1), axis=1)).sum(axis=1)
    half = int(np.ceil(a / 2))
    return _to_unit(total / (size / a * half * (1 + 2 * a - 2 * half)))


# ---- shapes -----------------------------------------------------------------

def _shape(x, kind):
    """Objective-wise shape values for the M-1 position coordinates ``x``."""
    count, mm1 = x.shape
    m = mm1 + 1
    out = np.empty((count, m))
    if kind == "linear":
        up, down = (lambda v: v), (lambda v: 1 - v)
    elif kind == "convex":
        up = lambda v: 1 - np.cos(v * PI / 2)  # noqa: E731
        down = lambda v: 1 - np.sin(v * PI / 2)  # noqa: E731
    else:
        up = lambda v: np.sin(v * PI / 2)  # noqa: E731
        down = lambda v: np.cos(v * PI / 2)  # noqa: E731
    for obj in range(1, m + 1):
        val = np.prod(up(x[:, : m - obj]), axis=1)
        if obj > 1:
            val = val * down(x[:, m - obj])
        out[:, obj - 1] = val
    return out


def mixed(x1, a=5, alpha=1.0):
    return (1 - x1 - np.cos(2 * a * PI * x1 + PI / 2) / (2 * a * PI)) ** alpha


def disc(x1, a=5, alpha=1.0, beta=1.0):
    return 1 - x1**alpha * np.cos(a * x1**beta * PI) ** 2


# ---- assembly ---------------------------------------------------------------

def _groups(k, m):
    size = k // (m - 1)
    return [slice(i * size, (i + 1) * size) for i in range(m - 1)]


def _reduce_sum(y, k, m, weights=None):
    if weights is None:
        weights = np.ones(y.shape[1])
    cols = [r_sum(y[:, g], weights[g]) for g in _groups(k, m)]
    cols.append(r_sum(y[:, k:], weights[k:]))
    return np.column_stack(cols)


def _reduce_nonsep(y, k, m):
    cols = [r_nonsep(y[:, g], k // (m - 1)) for g in _groups(k, m)]
    cols.append(r_nonsep(y[:, k:], y.shape[1] - k))
    return np.column_stack(cols)


def _finish(t, shape_vals_fn, degenerate=False):
    m = t.shape[1]
    a = np.ones(m - 1)
    if degenerate:
        a[1:] = 0.0
    tm = t[:, -1:]
    x = np.maximum(tm, a) * (t[:, :-1] - 0.5) + 0.5
    h = shape_vals_fn(x)
    scale = 2.0 * np.arange(1, m + 1)
    return tm + scale * h


def _convex_mixed(x):
    h = _shape(x, "convex")
    h[:, -1] = mixed(x[:, 0])
    return h


def _convex_disc(x):
    h = _shape(x, "convex")
    h[:, -1] = disc(x[:, 0])
    return h


def _concave(x):
    return _shape(x, "concave")


def _linear(x):
    return _shape(x, "linear")


def _pairs_nonsep(y, k):
    l = y.shape[1] - k
    pairs = [r_nonsep(y[:, k + 2 * i : k + 2 * i + 2], 2) for i in range(l // 2)]
    return np.column_stack([y[:, :k]] + pairs)


def _param_following(y):
    # bias each variable by the mean of the variables after it
    n = y.shape[1]
    out = y.copy()
    tail = np.cumsum(y[:, ::-1], axis=1)[:, ::-1]
    for i in range(n - 1):
        u = tail[:, i + 1] / (n - i - 1)
        out[:, i] = b_param(y[:, i], u, 0.98 / 49.98, 0.02, 50)
    return out


def wfg1(y, k, m):
    y = y.copy()
    y[:, k:] = s_linear(y[:, k:], 0.35)
    y[:, k:] = b_flat(y[:, k:], 0.8, 0.75, 0.85)
    y = b_poly(y, 0.02)
    w = 2.0 * np.arange(1, y.shape[1] + 1)
    return _finish(_reduce_sum(y, k, m, w), _convex_mixed)


def wfg2(y, k, m):
    y = y.copy()
    y[:, k:] = s_linear(y[:, k:], 0.35)
    y = _pairs_nonsep(y, k)
    return _finish(_reduce_sum(y, k, m), _convex_disc)


def wfg3(y, k, m):
    y = y.copy()
    y[:, k:] = s_linear(y[:, k:], 0.35)
    y = _pairs_nonsep(y, k)
    return _finish(_reduce_sum(y, k, m), _linear, degenerate=True)


def wfg4(y, k, m):
    y = s_multi(y, 30, 10, 0.35)
    return _finish(_reduce_sum(y, k, m), _concave)


def wfg5(y, k, m):
    y = s_decept(y, 0.35, 0.001, 0.05)
    return _finish(_reduce_sum(y, k, m), _concave)


def wfg6(y, k, m):
    y = y.copy()
    y[:, k:] = s_linear(y[:, k:], 0.35)
    return _finish(_reduce_nonsep(y, k, m), _concave)


def wfg7(y, k, m):
    y = y.copy()
    biased = _param_following(y)
    y[:, :k] = biased[:, :k]
    y[:, k:] = s_linear(y[:, k:], 0.35)
    return _finish(_reduce_sum(y, k, m), _concave)


def wfg8(y, k, m):
    n = y.shape[1]
    out = y.copy()
    head = np.cumsum(y, axis=1)
    for i in range(k, n):
        u = head[:, i - 1] / i
        out[:, i] = b_param(y[:, i], u, 0.98 / 49.98, 0.02, 50)
    out[:, k:] = s_linear(out[:, k:], 0.35)
    return _finish(_reduce_sum(out, k, m), _concave)


def wfg9(y, k, m):
    y = _param_following(y)
    y[:, :k] = s_decept(y[:, :k], 0.35, 0.001, 0.05)
    y[:, k:] = s_multi(y[:, k:], 30, 95, 0.35)
    return _finish(_reduce_nonsep(y, k, m), _concave)


KERNELS = {
    "WFG1": wfg1, "WFG2": wfg2, "WFG3": wfg3, "WFG4": wfg4, "WFG5": wfg5,
    "WFG6": wfg6, "WFG7": wfg7, "WFG8": wfg8, "WFG9": wfg9,
}


def make_func(name: str, k: int, m: int):
    kernel = KERNELS[name]

    def func(z):
        upper = 2.0 * np.arange(1, z.shape[1] + 1)
        return kernel(z / upper, k, m)

    return func


def default_kl(m: int) -> tuple[int, int]:
    if m == 2:
        return 2, 4
    return 2 * (m - 1), 20


def front_shape(name: str, x: np.ndarray) -> np.ndarray:
    """Objective vectors on the true front for position parameters ``x``
    (shape (count, m-1), values in [0, 1])."""
    x = np.array(x, dtype=float)
    if name == "WFG3":
        x[:, 1:] = 0.5
    m = x.shape[1] + 1
    fn = {"WFG1": _convex_mixed, "WFG2": _convex_disc, "WFG3": _linear}.get(name, _concave)
    return 2.0 * np.arange(1, m + 1) * fn(x)


def pareto_set_point(name: str, t, k: int, l: int) -> np.ndarray:
    """Optimal decision vector for WFG1-WFG7 given position values ``t``
    (length k, in [0, 1]); distance variables sit at 0.35 of their range."""
    if name in ("WFG8", "WFG9"):
        raise ValueError(f"{name} has a position-dependent optimal set")
    n = k + l
    t = np.asarray(t, dtype=float)
    y = np.full(n, 0.35)
    y[:k] = t
    return y * 2.0 * np.arange(1, n + 1)
