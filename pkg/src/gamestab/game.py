"""Two-player continuous games, their gradient field and game Jacobian.

Conventions used throughout the package:

* a joint action is the stacked vector ``x = (x1, x2)`` with ``x1`` of
  length ``d1`` and ``x2`` of length ``d2``;
* the gradient field is ``g(x) = (D1 f1(x), D2 f2(x))``;
* the game Jacobian stores ``J = -Dg(x)`` so that "stable" always means
  "J is Hurwitz".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionError,
    EvaluationError,
    SingularSystemError,
)

DEFAULT_FD_STEP = 1e-5
SYMMETRY_TOL = 1e-12
BLOCK_SYMMETRY_TOL = 1e-10
MAX_HALVINGS = 30


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class JointAction:
    """Joint action profile ``(x1, x2)``."""

    x1: np.ndarray
    x2: np.ndarray

    def __post_init__(self):
        x1 = _frozen(np.atleast_1d(self.x1))
        x2 = _frozen(np.atleast_1d(self.x2))
        if x1.ndim != 1 or x2.ndim != 1 or x1.size < 1 or x2.size < 1:
            raise DimensionError("x1 and x2 must be non-empty vectors")
        if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise ValueError("joint action has non-finite entries")
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)

    @property
    def d1(self) -> int:
        return self.x1.size

    @property
    def d2(self) -> int:
        return self.x2.size

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x1, self.x2])

    @classmethod
    def from_vector(cls, v, d1: int) -> "JointAction":
        v = np.asarray(v, dtype=float).ravel()
        if not 1 <= d1 < v.size:
            raise DimensionError(f"cannot split vector of length {v.size} at d1={d1}")
        return cls(v[:d1], v[d1:])


ActionLike = Union[JointAction, np.ndarray, list, tuple]


def as_vector(x: ActionLike, d1: int, d2: int) -> np.ndarray:
    """Return the stacked action vector, checking it against ``(d1, d2)``."""
    if isinstance(x, JointAction):
        if (x.d1, x.d2) != (d1, d2):
            raise DimensionError(
                f"joint action has dims ({x.d1}, {x.d2}), game expects ({d1}, {d2})"
            )
        return x.vector
    v = np.asarray(x, dtype=float).ravel()
    if v.size != d1 + d2:
        raise DimensionError(f"action vector has length {v.size}, expected {d1 + d2}")
    if not np.all(np.isfinite(v)):
        raise ValueError("action vector has non-finite entries")
    return v


@dataclass(frozen=True)
class GameJacobian:
    """Block game Jacobian ``J = -Dg = [[J11, J12], [J21, J22]]``."""

    J11: np.ndarray
    J12: np.ndarray
    J21: np.ndarray
    J22: np.ndarray

    def __post_init__(self):
        blocks = {}
        for name in ("J11", "J12", "J21", "J22"):
            b = np.array(getattr(self, name), dtype=float)
            if b.ndim != 2:
                raise DimensionError(f"{name} must be a matrix")
            blocks[name] = b
        d1, d2 = blocks["J11"].shape[0], blocks["J22"].shape[0]
        expected = {"J11": (d1, d1), "J12": (d1, d2), "J21": (d2, d1), "J22": (d2, d2)}
        for name, shape in expected.items():
            if blocks[name].shape != shape:
                raise DimensionError(
                    f"{name} has shape {blocks[name].shape}, expected {shape}"
                )
        scale = 1.0 + max(np.max(np.abs(b)) if b.size else 0.0 for b in blocks.values())
        for name in ("J11", "J22"):
            b = blocks[name]
            if np.max(np.abs(b - b.T)) > BLOCK_SYMMETRY_TOL * scale:
                raise ValueError(f"{name} must be symmetric (individual Hessian)")
        for name, b in blocks.items():
            if not np.all(np.isfinite(b)):
                raise ValueError(f"{name} has non-finite entries")
            b.setflags(write=False)
            object.__setattr__(self, name, b)

    @property
    def d1(self) -> int:
        return self.J11.shape[0]

    @property
    def d2(self) -> int:
        return self.J22.shape[0]

    @property
    def full(self) -> np.ndarray:
        return np.block([[self.J11, self.J12], [self.J21, self.J22]])

    @classmethod
    def from_matrix(cls, M, d1: int) -> "GameJacobian":
        M = np.asarray(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or not 1 <= d1 < M.shape[0]:
            raise DimensionError(f"cannot partition matrix of shape {M.shape} at d1={d1}")
        return cls(M[:d1, :d1], M[:d1, d1:], M[d1:, :d1], M[d1:, d1:])

    def scaled(self, tau: float) -> np.ndarray:
        """Full matrix ``Lambda J`` with ``Lambda = blockdiag(I_d1, tau I_d2)``."""
        return lam_diagonal(self.d1, self.d2, tau)[:, None] * self.full


@dataclass(frozen=True)
class LearningConfig:
    """Step size ``gamma1`` of player 1 and learning-rate ratio ``tau = gamma2/gamma1``."""

    gamma1: float = 1e-3
    tau: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.gamma1) and self.gamma1 > 0):
            raise ValueError(f"gamma1 must be positive, got {self.gamma1}")
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ValueError(f"tau must be positive, got {self.tau}")

    @property
    def gamma2(self) -> float:
        return self.gamma1 * self.tau


def lam_diagonal(d1: int, d2: int, tau: float) -> np.ndarray:
    """Diagonal of ``Lambda = blockdiag(I_d1, tau I_d2)``."""
    return np.concatenate([np.ones(d1), np.full(d2, float(tau))])


@dataclass(frozen=True)
class QuadraticGame:
    """Game with costs ``f_i(x) = 1/2 x^T Q_i x + b_i^T x``.

    ``Q1`` and ``Q2`` are full symmetric ``(d1+d2) x (d1+d2)`` matrices; the
    blocks needed for the Jacobian are sliced out on demand.
    """

    d1: int
    d2: int
    Q1: np.ndarray
    Q2: np.ndarray
    b1: Optional[np.ndarray] = None
    b2: Optional[np.ndarray] = None

    def __post_init__(self):
        if int(self.d1) < 1 or int(self.d2) < 1:
            raise DimensionError("d1 and d2 must be at least 1")
        object.__setattr__(self, "d1", int(self.d1))
        object.__setattr__(self, "d2", int(self.d2))
        n = self.d1 + self.d2
        for name in ("Q1", "Q2"):
            Q = np.array(getattr(self, name), dtype=float)
            if Q.shape != (n, n):
                raise DimensionError(f"{name} has shape {Q.shape}, expected {(n, n)}")
            if not np.all(np.isfinite(Q)):
                raise ValueError(f"{name} has non-finite entries")
            if np.max(np.abs(Q - Q.T)) > SYMMETRY_TOL:
                raise ValueError(f"{name} must be symmetric")
            object.__setattr__(self, name, _frozen(Q))
        for name in ("b1", "b2"):
            b = getattr(self, name)
            b = np.zeros(n) if b is None else np.array(b, dtype=float).ravel()
            if b.shape != (n,):
                raise DimensionError(f"{name} has length {b.size}, expected {n}")
            object.__setattr__(self, name, _frozen(b))

    @classmethod
    def zero_sum(cls, Q, d1: int, b=None) -> "QuadraticGame":
        """The game ``(f, -f)`` with ``f = 1/2 x^T Q x + b^T x``."""
        Q = np.asarray(Q, dtype=float)
        b = np.zeros(Q.shape[0]) if b is None else np.asarray(b, dtype=float)
        return cls(d1, Q.shape[0] - d1, Q, -Q, b, -b)

    def cost(self, i: int, x: ActionLike) -> float:
        v = as_vector(x, self.d1, self.d2)
        Q, b = (self.Q1, self.b1) if i == 1 else (self.Q2, self.b2)
        return float(0.5 * v @ Q @ v + b @ v)

    def gradient_field(self, x: ActionLike) -> np.ndarray:
        v = as_vector(x, self.d1, self.d2)
        d1 = self.d1
        return np.concatenate(
            [self.Q1[:d1] @ v + self.b1[:d1], self.Q2[d1:] @ v + self.b2[d1:]]
        )

    def jacobian_matrix(self) -> np.ndarray:
        """``Dg``, constant for quadratic games."""
        d1 = self.d1
        return np.vstack([self.Q1[:d1], self.Q2[d1:]])

    def as_oracle(self) -> "CostOracle":
        d1 = self.d1
        return CostOracle(
            self.d1,
            self.d2,
            cost1=lambda x: self.cost(1, x),
            cost2=lambda x: self.cost(2, x),
            grad1=lambda x: self.Q1[:d1] @ x + self.b1[:d1],
            grad2=lambda x: self.Q2[d1:] @ x + self.b2[d1:],
            hessians=lambda x: (
                self.Q1[:d1, :d1],
                self.Q1[:d1, d1:],
                self.Q2[d1:, :d1],
                self.Q2[d1:, d1:],
            ),
        )


@dataclass(frozen=True)
class CostOracle:
    """Game given by callables on the stacked action vector.

    ``grad1``/``grad2`` return ``D1 f1`` (length d1) and ``D2 f2`` (length d2).
    ``hessians`` returns ``(D1^2 f1, D12 f1, D21 f2, D2^2 f2)``. Missing
    derivatives are replaced by central differences.
    """

    d1: int
    d2: int
    cost1: Callable[[np.ndarray], float]
    cost2: Callable[[np.ndarray], float]
    grad1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    grad2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessians: Optional[Callable[[np.ndarray], tuple]] = field(default=None)

    def __post_init__(self):
        if int(self.d1) < 1 or int(self.d2) < 1:
            raise DimensionError("d1 and d2 must be at least 1")

    def _player_gradient(self, i: int, v: np.ndarray, h: float = 1e-6) -> np.ndarray:
        grad = self.grad1 if i == 1 else self.grad2
        if grad is not None:
            return np.asarray(grad(v), dtype=float).ravel()
        cost = self.cost1 if i == 1 else self.cost2
        idx = range(self.d1) if i == 1 else range(self.d1, self.d1 + self.d2)
        out = []
        for j in idx:
            e = np.zeros_like(v)
            e[j] = h
            out.append((cost(v + e) - cost(v - e)) / (2 * h))
        return np.array(out, dtype=float)

    def gradient_field(self, x: ActionLike) -> np.ndarray:
        v = as_vector(x, self.d1, self.d2)
        g = np.concatenate([self._player_gradient(1, v), self._player_gradient(2, v)])
        if g.shape != (self.d1 + self.d2,):
            raise DimensionError(f"oracle gradients have total length {g.size}")
        if not np.all(np.isfinite(g)):
            raise EvaluationError(f"non-finite gradient at {v}")
        return g

    def check_derivatives(self, n_probes: int = 5, seed: int = 0, rtol: float = 1e-5,
                          scale: float = 1.0) -> bool:
        """Compare analytic derivatives against central differences at random points."""
        rng = np.random.default_rng(seed)
        n = self.d1 + self.d2
        bare = CostOracle(self.d1, self.d2, self.cost1, self.cost2)
        for _ in range(n_probes):
            v = rng.standard_normal(n) * scale
            if self.grad1 is not None or self.grad2 is not None:
                fd = bare.gradient_field(v)
                an = self.gradient_field(v)
                if not np.allclose(an, fd, rtol=rtol, atol=rtol * (1 + np.max(np.abs(fd)))):
                    return False
            if self.hessians is not None:
                fd_J = finite_difference_jacobian(
                    CostOracle(self.d1, self.d2, self.cost1, self.cost2,
                               self.grad1, self.grad2), v)
                an_J = _analytic_jacobian(self, v)
                atol = rtol * (1 + np.max(np.abs(fd_J.full)))
                if not np.allclose(an_J.full, fd_J.full, rtol=rtol, atol=atol):
                    return False
        return True


Game = Union[QuadraticGame, CostOracle]


def eval_gradient_field(game: Game, x: ActionLike) -> np.ndarray:
    """Stacked individual gradients ``g(x) = (D1 f1(x), D2 f2(x))``."""
    g = game.gradient_field(x)
    if not np.all(np.isfinite(g)):
        raise EvaluationError("gradient field is not finite")
    return g


def assemble_jacobian(game: QuadraticGame, x: ActionLike = None) -> GameJacobian:
    """Exact game Jacobian of a quadratic game (independent of ``x``)."""
    if not isinstance(game, QuadraticGame):
        raise TypeError("assemble_jacobian needs a QuadraticGame; use jacobian_at")
    if x is not None:
        as_vector(x, game.d1, game.d2)
    return GameJacobian.from_matrix(-game.jacobian_matrix(), game.d1)


def finite_difference_jacobian(oracle: Game, x: ActionLike,
                               h: float = DEFAULT_FD_STEP) -> GameJacobian:
    """Central-difference estimate of ``J = -Dg(x)``.

    Diagonal blocks are symmetrized by averaging with their transpose.
    """
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    d1, d2 = oracle.d1, oracle.d2
    v = as_vector(x, d1, d2)
    n = d1 + d2
    Dg = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        Dg[:, j] = (oracle.gradient_field(v + e) - oracle.gradient_field(v - e)) / (2 * h)
    if not np.all(np.isfinite(Dg)):
        raise EvaluationError("finite differences are not finite")
    J = -Dg
    J[:d1, :d1] = 0.5 * (J[:d1, :d1] + J[:d1, :d1].T)
    J[d1:, d1:] = 0.5 * (J[d1:, d1:] + J[d1:, d1:].T)
    return GameJacobian.from_matrix(J, d1)


def _analytic_jacobian(oracle: CostOracle, v: np.ndarray) -> GameJacobian:
    H11, H12, H21, H22 = (np.asarray(h, dtype=float) for h in oracle.hessians(v))
    J = GameJacobian(-0.5 * (H11 + H11.T), -H12, -H21, -0.5 * (H22 + H22.T))
    if (J.d1, J.d2) != (oracle.d1, oracle.d2):
        raise DimensionError("oracle Hessians do not match (d1, d2)")
    return J


def jacobian_at(game: Game, x: ActionLike, h: float = DEFAULT_FD_STEP) -> GameJacobian:
    """Game Jacobian at ``x`` using the most exact route the game offers."""
    if isinstance(game, QuadraticGame):
        return assemble_jacobian(game, x)
    if game.hessians is not None:
        return _analytic_jacobian(game, as_vector(x, game.d1, game.d2))
    return finite_difference_jacobian(game, x, h)


def find_fixed_point(game: Game, x0: ActionLike, tol: float = 1e-10,
                     max_iters: int = 50) -> JointAction:
    """Damped Newton iteration on ``g(x) = 0``.

    Each Newton step is halved (at most 30 times) until the max-norm of
    ``g`` decreases.

    Raises
    ------
    SingularSystemError
        if ``Dg`` is numerically singular at an iterate.
    ConvergenceError
        if ``max_iters`` steps do not bring ``||g||_inf`` below ``tol`` or
        no damped step decreases the residual.
    """
    d1, d2 = game.d1, game.d2
    x = as_vector(x0, d1, d2).copy()
    r = eval_gradient_field(game, x)
    res = np.max(np.abs(r))
    for _ in range(max_iters):
        if res <= tol:
            return JointAction.from_vector(x, d1)
        Dg = -jacobian_at(game, x).full
        if np.linalg.cond(Dg) > 1e14:
            raise SingularSystemError("Newton system is singular", residual=res, iterate=x)
        try:
            step = np.linalg.solve(Dg, -r)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(str(exc), residual=res, iterate=x) from exc
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            x_new = x + t * step
            r_new = eval_gradient_field(game, x_new)
            res_new = np.max(np.abs(r_new))
            if res_new < res:
                break
            t *= 0.5
        else:
            raise ConvergenceError("damped Newton step failed to reduce the residual",
                                   residual=res, iterate=x)
        x, r, res = x_new, r_new, res_new
    if res <= tol:
        return JointAction.from_vector(x, d1)
    raise ConvergenceError(f"no fixed point within {max_iters} iterations "
                           f"(residual {res:.3e})", residual=res, iterate=x)
