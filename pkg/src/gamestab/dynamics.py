"""Simulation of gradient play and learning-rate-ratio sweeps.

Discrete time::

    x1 <- x1 - gamma1 * D1 f1(x),    x2 <- x2 - gamma1 * tau * D2 f2(x)

Continuous time: ``dx/dt = -Lambda g(x)`` integrated with fixed-step RK4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game import (
    Game,
    GameJacobian,
    LearningConfig,
    as_vector,
    lam_diagonal,
)
from .spectral import Spectrum, eigenvalues, spectral_radius

MAX_STORED = 10_000
GOLDEN_ITERS = 40
_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass
class TrajectoryRecord:
    """Stored states of a simulation.

    ``times`` are step indices for discrete runs and physical times for
    continuous runs. ``steps`` is the number of updates actually taken and
    ``terminated`` one of ``"converged"``, ``"diverged"``, ``"max_steps"``.
    """

    times: np.ndarray
    states: np.ndarray
    norms: np.ndarray
    config: LearningConfig
    terminated: str
    steps: int
    d1: int

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _stride(max_steps: int) -> int:
    return 1 if max_steps <= MAX_STORED else -(-max_steps // MAX_STORED)


def _norm(x: np.ndarray) -> float:
    with np.errstate(over="ignore"):
        return float(np.linalg.norm(x))


def _default_div_bound(x0: np.ndarray) -> float:
    return 1e6 * (1.0 + float(np.linalg.norm(x0)))


def _finish(times, states, config, terminated, steps, d1) -> TrajectoryRecord:
    S = np.array(states)
    with np.errstate(over="ignore", invalid="ignore"):
        norms = np.linalg.norm(S, axis=1)
    return TrajectoryRecord(np.array(times, dtype=float), S, norms, config, terminated, steps, d1)


def simulate_discrete(game: Game, config: LearningConfig, x0, max_steps: int = 100_000,
                      conv_tol: float = 1e-6, div_bound: float | None = None,
                      target=None) -> TrajectoryRecord:
    """Iterate simultaneous gradient play from ``x0``.

    Stops when ``||x - target|| <= conv_tol`` (``target`` defaults to the
    origin), when ``||x|| >= div_bound`` or a state becomes non-finite, or
    after ``max_steps`` updates. Every state is stored for runs of at most
    10^4 steps, otherwise every ``ceil(max_steps / 10^4)``-th state plus the
    last one.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be nonnegative")
    d1, d2 = game.d1, game.d2
    x = as_vector(x0, d1, d2).copy()
    ref = np.zeros_like(x) if target is None else as_vector(target, d1, d2)
    bound = _default_div_bound(x) if div_bound is None else float(div_bound)
    step_scale = config.gamma1 * lam_diagonal(d1, d2, config.tau)
    stride = _stride(max_steps)

    times, states = [0], [x.copy()]
    status = "max_steps"
    k = 0
    if np.linalg.norm(x - ref) <= conv_tol:
        return _finish(times, states, config, "converged", 0, d1)
    while k < max_steps:
        with np.errstate(over="ignore", invalid="ignore"):
            x = x - step_scale * game.gradient_field(x)
        k += 1
        finite = np.all(np.isfinite(x))
        if not finite or _norm(x) >= bound:
            status = "diverged"
        elif np.linalg.norm(x - ref) <= conv_tol:
            status = "converged"
        if status != "max_steps" or k % stride == 0 or k == max_steps:
            times.append(k)
            states.append(x.copy())
        if status != "max_steps":
            break
    return _finish(times, states, config, status, k, d1)


def rk4_integrate(f, x0: np.ndarray, t_end: float, dt: float, max_stored: int = MAX_STORED,
                  div_bound: float = np.inf):
    """Classical fixed-step RK4 for ``dx/dt = f(x)`` on ``[0, t_end]``.

    The last step is shortened so the run ends exactly at ``t_end``.
    Returns ``(times, states, diverged)``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    n_steps = int(math.ceil(t_end / dt - 1e-12)) if t_end > 0 else 0
    stride = 1 if n_steps <= max_stored else -(-n_steps // max_stored)
    x = np.array(x0, dtype=float)
    t = 0.0
    times, states = [0.0], [x.copy()]
    for i in range(1, n_steps + 1):
        h = min(dt, t_end - t) if i == n_steps else dt
        with np.errstate(over="ignore", invalid="ignore"):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_end if i == n_steps else i * dt
        bad = not np.all(np.isfinite(x)) or _norm(x) >= div_bound
        if bad or i % stride == 0 or i == n_steps:
            times.append(t)
            states.append(x.copy())
        if bad:
            return times, states, True
    return times, states, False


def simulate_continuous(game: Game, tau: float, x0, t_end: float = 50.0, dt: float = 1e-2,
                        conv_tol: float = 1e-6, div_bound: float | None = None,
                        target=None) -> TrajectoryRecord:
    """Integrate ``dx/dt = -Lambda g(x)`` up to ``t_end``.

    The run is labelled converged when the final state is within
    ``conv_tol`` of ``target`` (default origin).
    """
    config = LearningConfig(1.0, tau)
    d1, d2 = game.d1, game.d2
    x = as_vector(x0, d1, d2)
    ref = np.zeros_like(x) if target is None else as_vector(target, d1, d2)
    lam = lam_diagonal(d1, d2, tau)
    bound = _default_div_bound(x) if div_bound is None else float(div_bound)

    def field(y):
        return -lam * game.gradient_field(y)

    times, states, diverged = rk4_integrate(field, x, t_end, dt, div_bound=bound)
    if diverged:
        status = "diverged"
    elif np.linalg.norm(states[-1] - ref) <= conv_tol:
        status = "converged"
    else:
        status = "max_steps"
    steps = int(math.ceil(t_end / dt - 1e-12)) if not diverged else len(times) - 1
    return _finish(times, states, config, status, steps, d1)


@dataclass
class SweepResult:
    taus: np.ndarray
    rho_discrete: np.ndarray
    spectra_continuous: list
    best_tau: float
    best_rho: float


def discrete_rate(J: GameJacobian, gamma1: float, tau: float) -> float:
    """Spectral radius of the linearized update ``I + gamma1 Lambda J``."""
    n = J.d1 + J.d2
    return spectral_radius(np.eye(n) + gamma1 * J.scaled(tau))


def tau_sweep(J: GameJacobian, gamma1: float, taus) -> SweepResult:
    taus = np.asarray(taus, dtype=float).ravel()
    if taus.size == 0 or np.any(taus <= 0):
        raise ValueError("taus must be a non-empty list of positive values")
    if np.any(np.diff(taus) <= 0):
        raise ValueError("taus must be strictly increasing")
    rho = np.array([discrete_rate(J, gamma1, t) for t in taus])
    spectra: list[Spectrum] = [eigenvalues(J.scaled(t)) for t in taus]
    i = int(np.argmin(rho))
    return SweepResult(taus, rho, spectra, float(taus[i]), float(rho[i]))


def optimal_tau(J: GameJacobian, gamma1: float, tau_lo: float, tau_hi: float,
                grid_n: int = 200) -> tuple[float, float]:
    """Minimize ``rho(I + gamma1 Lambda J)`` over ``tau`` in ``[tau_lo, tau_hi]``.

    A log-spaced grid picks the best bracket, which is then refined by
    golden-section search in ``log(tau)``.
    """
    if not 0 < tau_lo < tau_hi:
        raise ValueError("need 0 < tau_lo < tau_hi")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    grid = np.logspace(np.log10(tau_lo), np.log10(tau_hi), grid_n)
    sweep = tau_sweep(J, gamma1, grid)
    i = int(np.argmin(sweep.rho_discrete))
    lo = math.log(grid[max(i - 1, 0)])
    hi = math.log(grid[min(i + 1, grid_n - 1)])

    def rate(s):
        return discrete_rate(J, gamma1, math.exp(s))

    c, d = hi - _INV_PHI * (hi - lo), lo + _INV_PHI * (hi - lo)
    fc, fd = rate(c), rate(d)
    for _ in range(GOLDEN_ITERS):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = rate(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = rate(d)
    s_best, r_best = (c, fc) if fc <= fd else (d, fd)
    if sweep.best_rho <= r_best:
        return sweep.best_tau, sweep.best_rho
    return math.exp(s_best), r_best

