"""MOP1-MOP7: problems whose fronts have parts of very different difficulty.

Every variable lives in [0, 1]. The distance terms are scaled by
``sin(pi x1)`` (or ``|cos(pi x1)|`` for MOP5), so the boundary of the front
is far easier to reach than its interior.
"""

from __future__ import annotations

import numpy as np

PI = np.pi


def _bumpy(t):
    return np.sum(-0.9 * t**2 + np.abs(t) ** 0.6, axis=1)


def _saturating(t):
    a = np.abs(t)
    return np.sum(a / (1 + np.exp(5 * a)), axis=1)


def _offsets_2(x):
    return x[:, 1:] - np.sin(0.5 * PI * x[:, :1])


def _offsets_3(x):
    return x[:, 2:] - x[:, :1] * x[:, 1:2]


def mop1(x):
    x1 = x[:, 0]
    g = 2 * np.sin(PI * x1) * _bumpy(_offsets_2(x))
    return np.column_stack([(1 + g) * x1, (1 + g) * (1 - np.sqrt(x1))])


def mop2(x):
    x1 = x[:, 0]
    g = 10 * np.sin(PI * x1) * _saturating(_offsets_2(x))
    return np.column_stack([(1 + g) * x1, (1 + g) * (1 - x1**2)])


def mop3(x):
    x1 = x[:, 0]
    g = 10 * np.sin(PI * x1) * _saturating(_offsets_2(x))
    return np.column_stack([(1 + g) * np.cos(0.5 * PI * x1), (1 + g) * np.sin(0.5 * PI * x1)])


def mop4(x):
    x1 = x[:, 0]
    g = 10 * np.sin(PI * x1) * _saturating(_offsets_2(x))
    return np.column_stack(
        [(1 + g) * x1, (1 + g) * (1 - np.sqrt(x1) * np.cos(2 * PI * x1) ** 2)]
    )


def mop5(x):
    x1 = x[:, 0]
    g = 2 * np.abs(np.cos(PI * x1)) * _bumpy(_offsets_2(x))
    return np.column_stack([(1 + g) * x1, (1 + g) * (1 - np.sqrt(x1))])


def mop6(x):
    x1, x2 = x[:, 0], x[:, 1]
    g = 2 * np.sin(PI * x1) * _bumpy(_offsets_3(x))
    return np.column_stack([(1 + g) * x1 * x2, (1 + g) * x1 * (1 - x2), (1 + g) * (1 - x1)])


def mop7(x):
    x1, x2 = x[:, 0], x[:, 1]
    g = 2 * np.sin(PI * x1) * _bumpy(_offsets_3(x))
    a = 0.5 * PI * x1
    b = 0.5 * PI * x2
    return np.column_stack(
        [
            (1 + g) * np.cos(a) * np.cos(b),
            (1 + g) * np.cos(a) * np.sin(b),
            (1 + g) * np.sin(a),
        ]
    )


FUNCS = {
    "MOP1": mop1, "MOP2": mop2, "MOP3": mop3, "MOP4": mop4,
    "MOP5": mop5, "MOP6": mop6, "MOP7": mop7,
}


def objectives(name: str) -> int:
    return 3 if name in ("MOP6", "MOP7") else 2


def pareto_set_point(name: str, t, n: int) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = np.empty(n)
    if objectives(name) == 3:
        x[:2] = t[:2]
        x[2:] = t[0] * t[1]
    else:
        x[0] = t[0]
        x[1:] = np.sin(0.5 * PI * t[0])
    return x
