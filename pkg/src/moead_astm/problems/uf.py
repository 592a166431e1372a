"""CEC 2009 unconstrained test instances UF1-UF10.

All functions take a (k, n) batch. Variable j below is 1-based as in the
suite definition; ``J1``/``J2`` (and ``J3`` for three objectives) partition
variables 2..n (3..n) by index parity (residue mod 3).
"""

from __future__ import annotations

import numpy as np

PI = np.pi


def _index_sets_2(n: int):
    j = np.arange(1, n + 1)
    odd = (j >= 3) & (j % 2 == 1)
    even = (j >= 2) & (j % 2 == 0)
    return j, odd, even


def _index_sets_3(n: int):
    j = np.arange(1, n + 1)
    rest = j >= 3
    return j, rest & ((j - 1) % 3 == 0), rest & ((j - 2) % 3 == 0), rest & (j % 3 == 0)


def _mean_term(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return 2.0 * values[:, mask].sum(axis=1) / mask.sum()


def _sine_offsets(x: np.ndarray) -> np.ndarray:
    n = x.shape[1]
    j = np.arange(1, n + 1)
    return x - np.sin(6 * PI * x[:, :1] + j * PI / n)


def uf1(x):
    _, j1, j2 = _index_sets_2(x.shape[1])
    y2 = _sine_offsets(x) ** 2
    x1 = x[:, 0]
    return np.column_stack([x1 + _mean_term(y2, j1), 1 - np.sqrt(x1) + _mean_term(y2, j2)])


def uf2(x):
    n = x.shape[1]
    j, j1, j2 = _index_sets_2(n)
    x1 = x[:, :1]
    amp = 0.3 * x1**2 * np.cos(24 * PI * x1 + 4 * j * PI / n) + 0.6 * x1
    phase = 6 * PI * x1 + j * PI / n
    y = np.where(j % 2 == 1, x - amp * np.cos(phase), x - amp * np.sin(phase))
    y2 = y**2
    return np.column_stack(
        [x[:, 0] + _mean_term(y2, j1), 1 - np.sqrt(x[:, 0]) + _mean_term(y2, j2)]
    )


def _uf3_like(y: np.ndarray, j: np.ndarray, mask: np.ndarray) -> np.ndarray:
    ym = y[:, mask]
    prod = np.prod(np.cos(20 * ym * PI / np.sqrt(j[mask])), axis=1)
    return 2.0 / mask.sum() * (4 * np.sum(ym**2, axis=1) - 2 * prod + 2)


def uf3(x):
    n = x.shape[1]
    j, j1, j2 = _index_sets_2(n)
    x1 = x[:, :1]
    expo = 0.5 * (1.0 + 3.0 * (j - 2) / (n - 2))
    y = x - x1**expo
    return np.column_stack(
        [x[:, 0] + _uf3_like(y, j, j1), 1 - np.sqrt(x[:, 0]) + _uf3_like(y, j, j2)]
    )


def uf4(x):
    _, j1, j2 = _index_sets_2(x.shape[1])
    y = np.abs(_sine_offsets(x))
    h = y / (1 + np.exp(2 * y))
    x1 = x[:, 0]
    return np.column_stack([x1 + _mean_term(h, j1), 1 - x1**2 + _mean_term(h, j2)])


def uf5(x, parts: int = 10, eps: float = 0.1):
    _, j1, j2 = _index_sets_2(x.shape[1])
    y = _sine_offsets(x)
    h = 2 * y**2 - np.cos(4 * PI * y) + 1
    x1 = x[:, 0]
    ripple = (0.5 / parts + eps) * np.abs(np.sin(2 * parts * PI * x1))
    return np.column_stack(
        [x1 + ripple + _mean_term(h, j1), 1 - x1 + ripple + _mean_term(h, j2)]
    )


def uf6(x, parts: int = 2, eps: float = 0.1):
    n = x.shape[1]
    j, j1, j2 = _index_sets_2(n)
    y = _sine_offsets(x)
    x1 = x[:, 0]
    bump = np.maximum(0.0, 2 * (0.5 / parts + eps) * np.sin(2 * parts * PI * x1))
    return np.column_stack(
        [x1 + bump + _uf3_like(y, j, j1), 1 - x1 + bump + _uf3_like(y, j, j2)]
    )


def uf7(x):
    _, j1, j2 = _index_sets_2(x.shape[1])
    y2 = _sine_offsets(x) ** 2
    root = x[:, 0] ** 0.2
    return np.column_stack([root + _mean_term(y2, j1), 1 - root + _mean_term(y2, j2)])


def _uf8_offsets(x):
    n = x.shape[1]
    j = np.arange(1, n + 1)
    return x - 2 * x[:, 1:2] * np.sin(2 * PI * x[:, :1] + j * PI / n)


def _sphere(x):
    a = 0.5 * PI * x[:, 0]
    b = 0.5 * PI * x[:, 1]
    return np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(a)


def uf8(x):
    _, j1, j2, j3 = _index_sets_3(x.shape[1])
    y2 = _uf8_offsets(x) ** 2
    s1, s2, s3 = _sphere(x)
    return np.column_stack(
        [s1 + _mean_term(y2, j1), s2 + _mean_term(y2, j2), s3 + _mean_term(y2, j3)]
    )


def uf9(x, eps: float = 0.1):
    _, j1, j2, j3 = _index_sets_3(x.shape[1])
    y2 = _uf8_offsets(x) ** 2
    x1, x2 = x[:, 0], x[:, 1]
    hump = np.maximum(0.0, (1 + eps) * (1 - 4 * (2 * x1 - 1) ** 2))
    return np.column_stack(
        [
            0.5 * (hump + 2 * x1) * x2 + _mean_term(y2, j1),
            0.5 * (hump - 2 * x1 + 2) * x2 + _mean_term(y2, j2),
            1 - x2 + _mean_term(y2, j3),
        ]
    )


def uf10(x):
    _, j1, j2, j3 = _index_sets_3(x.shape[1])
    y = _uf8_offsets(x)
    h = 4 * y**2 - np.cos(8 * PI * y) + 1
    s1, s2, s3 = _sphere(x)
    return np.column_stack(
        [s1 + _mean_term(h, j1), s2 + _mean_term(h, j2), s3 + _mean_term(h, j3)]
    )


FUNCS = {
    "UF1": uf1, "UF2": uf2, "UF3": uf3, "UF4": uf4, "UF5": uf5,
    "UF6": uf6, "UF7": uf7, "UF8": uf8, "UF9": uf9, "UF10": uf10,
}


def objectives(name: str) -> int:
    return 3 if name in ("UF8", "UF9", "UF10") else 2


def box(name: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    lower = np.full(n, -1.0)
    upper = np.full(n, 1.0)
    if name == "UF3":
        lower[:] = 0.0
    elif name == "UF4":
        lower[:], upper[:] = -2.0, 2.0
    elif name in ("UF8", "UF9", "UF10"):
        lower[:], upper[:] = -2.0, 2.0
        lower[:2], upper[:2] = 0.0, 1.0
        return lower, upper
    lower[0], upper[0] = 0.0, 1.0
    return lower, upper


def pareto_set_point(name: str, t, n: int) -> np.ndarray:
    """A Pareto-optimal decision vector for position parameter(s) ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    j = np.arange(1, n + 1)
    if name in ("UF8", "UF9", "UF10"):
        x = np.empty(n)
        x[:2] = t[:2]
        x[2:] = (2 * x[1] * np.sin(2 * PI * x[0] + j * PI / n))[2:]
        return x
    x1 = t[0]
    if name == "UF2":
        amp = 0.3 * x1**2 * np.cos(24 * PI * x1 + 4 * j * PI / n) + 0.6 * x1
        phase = 6 * PI * x1 + j * PI / n
        x = np.where(j % 2 == 1, amp * np.cos(phase), amp * np.sin(phase))
    elif name == "UF3":
        x = x1 ** (0.5 * (1.0 + 3.0 * (j - 2) / (n - 2)))
    else:
        x = np.sin(6 * PI * x1 + j * PI / n)
    x = np.array(x, dtype=float)
    x[0] = x1
    return x
