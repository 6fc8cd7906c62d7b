"""The four worked example games, with their named parameters.

Every preset is a two-dimensional-per-player quadratic game written as
full Hessians of the printed costs in the ordering ``(x1, x2, y1, y2)``.

example1  zero-sum  f = -x1^2 + 3 x2^2 - (2 y1^2 + 6 y2^2) + b (2 y1 x1 + y2 x2)
example2  potential f1 = x1^2 + 2 x2^2 + p (x1 y1 + x2 y2)
                    f2 = 3 y1^2 + 4 y2^2 + p (x1 y1 + x2 y2)
example4  general   f1 = -x1^2 + 3 x2^2 - x1 x2 + 8 x1 y1 - 2 x2 y2
                    f2 = y1^2 + 4 y2^2 - y1 y2 + 2 x1 y2 + 2 x2 y1
example5  zero-sum  f = (1-eps)(x1^2 + 3/2 x2^2 - 2 y1^2 - 5/2 y2^2) + eps x^T B y,
                    B = [[1, 1], [1, -1]]
"""

from __future__ import annotations

import numpy as np

from .game import QuadraticGame

DEFAULTS = {
    "example1": {"b": 2.0},
    "example2": {"p": 1.0},
    "example4": {},
    "example5": {"eps": 0.9},
}


def example1(b: float = 2.0) -> QuadraticGame:
    Q = np.array([
        [-2.0, 0.0, 2 * b, 0.0],
        [0.0, 6.0, 0.0, b],
        [2 * b, 0.0, -4.0, 0.0],
        [0.0, b, 0.0, -12.0],
    ])
    return QuadraticGame.zero_sum(Q, 2)


def example2(p: float = 1.0) -> QuadraticGame:
    Q1 = np.array([
        [2.0, 0.0, p, 0.0],
        [0.0, 4.0, 0.0, p],
        [p, 0.0, 0.0, 0.0],
        [0.0, p, 0.0, 0.0],
    ])
    Q2 = np.array([
        [0.0, 0.0, p, 0.0],
        [0.0, 0.0, 0.0, p],
        [p, 0.0, 6.0, 0.0],
        [0.0, p, 0.0, 8.0],
    ])
    return QuadraticGame(2, 2, Q1, Q2)


def example4() -> QuadraticGame:
    Q1 = np.array([
        [-2.0, -1.0, 8.0, 0.0],
        [-1.0, 6.0, 0.0, -2.0],
        [8.0, 0.0, 0.0, 0.0],
        [0.0, -2.0, 0.0, 0.0],
    ])
    Q2 = np.array([
        [0.0, 0.0, 0.0, 2.0],
        [0.0, 0.0, 2.0, 0.0],
        [0.0, 2.0, 2.0, -1.0],
        [2.0, 0.0, -1.0, 8.0],
    ])
    return QuadraticGame(2, 2, Q1, Q2)


def example5(eps: float = 0.9) -> QuadraticGame:
    c = 1.0 - eps
    B = np.array([[1.0, 1.0], [1.0, -1.0]])
    Q = np.block([
        [np.diag([2 * c, 3 * c]), eps * B],
        [eps * B.T, np.diag([-4 * c, -5 * c])],
    ])
    return QuadraticGame.zero_sum(Q, 2)


_BUILDERS = {
    "example1": example1,
    "example2": example2,
    "example4": example4,
    "example5": example5,
}


def names():
    return sorted(_BUILDERS)


def build(name: str, params: dict | None = None) -> QuadraticGame:
    """Instantiate preset ``name``; unknown names or parameters raise ``ValueError``."""
    if name not in _BUILDERS:
        raise ValueError(f"unknown preset {name!r}; choose from {names()}")
    params = dict(params or {})
    unknown = set(params) - set(DEFAULTS[name])
    if unknown:
        raise ValueError(f"preset {name} does not take parameters {sorted(unknown)}")
    kwargs = {**DEFAULTS[name], **{k: float(v) for k, v in params.items()}}
    return _BUILDERS[name](**kwargs)
