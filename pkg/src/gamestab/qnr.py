"""Sampling estimators for the numerical range W(J) and quadratic numerical range W^2(J).

Unit vectors are normalized standard complex Gaussians, which is the
rotation-invariant measure on the complex sphere. Draws are produced in
fixed-size chunks, each with its own stream derived from ``(seed, kind,
chunk index)``; an estimate with more samples therefore extends, rather
than replaces, one with fewer samples under the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import compress_batch, quadratic_roots
from .game import GameJacobian
from .spectral import eigenvalues

DEFAULT_SAMPLES = 5000
CHUNK = 1024
_QNR_STREAM = 0
_NR_STREAM = 1


def _unit_rows(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    Z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return Z / np.linalg.norm(Z, axis=1, keepdims=True)


def sample_unit_pairs(d1: int, d2: int, n: int, seed: int):
    """First ``n`` draws of complex unit pairs ``(v, w)`` for ``seed``."""
    Vs, Ws = [], []
    for chunk in range(-(-n // CHUNK)):
        rng = np.random.default_rng([seed, _QNR_STREAM, chunk])
        Vs.append(_unit_rows(rng, CHUNK, d1))
        Ws.append(_unit_rows(rng, CHUNK, d2))
    return np.concatenate(Vs)[:n], np.concatenate(Ws)[:n]


def sample_unit_vectors(dim: int, n: int, seed: int) -> np.ndarray:
    Xs = []
    for chunk in range(-(-n // CHUNK)):
        rng = np.random.default_rng([seed, _NR_STREAM, chunk])
        Xs.append(_unit_rows(rng, CHUNK, dim))
    return np.concatenate(Xs)[:n]


@dataclass(frozen=True)
class QnrEstimate:
    """Sampled point clouds for W^2(J) (``points``) and W(J) (``nr_points``).

    ``points`` holds both roots for each of the ``samples`` draws, so it
    has ``2 * samples`` entries; roots of draw ``i`` sit at ``2i`` and
    ``2i + 1``. ``box`` is ``(min Re, max Re, 0.0, max |Im|)``.
    """

    points: np.ndarray
    nr_points: np.ndarray
    samples: int
    seed: int
    box: tuple

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "box": {
                "re_min": self.box[0],
                "re_max": self.box[1],
                "im_abs_min": self.box[2],
                "im_abs_max": self.box[3],
            },
        }


def _box(points: np.ndarray) -> tuple:
    return (
        float(points.real.min()),
        float(points.real.max()),
        0.0,
        float(np.abs(points.imag).max()),
    )


def qnr_draws(J: GameJacobian, n: int, seed: int):
    """Compressed entries ``(a, b, c, d)`` and roots for the first ``n`` draws."""
    V, W = sample_unit_pairs(J.d1, J.d2, n, seed)
    a, b, c, d = compress_batch(J, V, W)
    return (a, b, c, d), quadratic_roots(a, d, b * c)


def sample_numerical_range(J, n: int, seed: int) -> np.ndarray:
    """``n`` Rayleigh quotients ``x^* J x`` for sampled complex unit ``x``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    M = J.full if isinstance(J, GameJacobian) else np.asarray(J, dtype=float)
    X = sample_unit_vectors(M.shape[0], n, seed)
    return np.einsum("ni,ij,nj->n", X.conj(), M, X)


def sample_qnr(J: GameJacobian, n: int = DEFAULT_SAMPLES, seed: int = 0,
               nr_samples: int | None = None) -> QnrEstimate:
    if n < 1:
        raise ValueError("n must be at least 1")
    _, roots = qnr_draws(J, n, seed)
    points = roots.reshape(-1)
    nr = sample_numerical_range(J, n if nr_samples is None else nr_samples, seed)
    points.setflags(write=False)
    nr.setflags(write=False)
    return QnrEstimate(points, nr, n, seed, _box(points))


@dataclass(frozen=True)
class ContainmentReport:
    eigenvalues: np.ndarray
    distances: np.ndarray
    under_sampled: np.ndarray
    tol: float

    @property
    def all_within(self) -> bool:
        return not bool(np.any(self.under_sampled))


def containment_check(J: GameJacobian, estimate: QnrEstimate, tol: float) -> ContainmentReport:
    """Distance from each eigenvalue of ``J`` to the nearest sampled W^2 point.

    Sampling under-approximates W^2, so a large distance only says the cloud
    is too sparse near that eigenvalue.
    """
    lam = eigenvalues(J.full).eigenvalues
    dist = np.min(np.abs(lam[:, None] - estimate.points[None, :]), axis=1)
    return ContainmentReport(lam, dist, dist > tol, tol)
