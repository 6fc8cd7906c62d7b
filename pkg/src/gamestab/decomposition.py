"""Structural splits of a game Jacobian.

* potential / rotational: ``J12 = P + Z``, ``J21 = P^T - Z^T``
* symmetric / skew: ``J = S + A``
* rotated block form: ``R J R^T = blockdiag(M+, M-) + [[Z1, Z2], [-Z2^T, Z3]]``
* 2x2 compressions ``J_{v,w}`` whose spectra make up the quadratic numerical range
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import GameJacobian
from .spectral import symmetric_eig

ZERO_EIG_TOL = 1e-10
UNIT_TOL = 1e-10


@dataclass(frozen=True)
class PotentialRotationalSplit:
    P: np.ndarray
    Z: np.ndarray


def split_potential_rotational(J: GameJacobian) -> PotentialRotationalSplit:
    return PotentialRotationalSplit(0.5 * (J.J12 + J.J21.T), 0.5 * (J.J12 - J.J21.T))


@dataclass(frozen=True)
class SymmetricSkewSplit:
    S: np.ndarray
    A: np.ndarray


def _full(J) -> np.ndarray:
    M = J.full if isinstance(J, GameJacobian) else np.asarray(J, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def split_symmetric_skew(J) -> SymmetricSkewSplit:
    M = _full(J)
    return SymmetricSkewSplit(0.5 * (M + M.T), 0.5 * (M - M.T))


@dataclass(frozen=True)
class RotatedBlockForm:
    """Rotation sorting the symmetric part into positive and nonpositive blocks.

    ``k`` is the number of strictly positive eigenvalues of ``(J + J^T)/2``.
    When ``k`` is 0 or ``d`` the off-diagonal coupling is empty and
    :attr:`applicable` is False.
    """

    R: np.ndarray
    Mplus: np.ndarray
    Mminus: np.ndarray
    Z1: np.ndarray
    Z2: np.ndarray
    Z3: np.ndarray
    k: int

    @property
    def d(self) -> int:
        return self.R.shape[0]

    @property
    def applicable(self) -> bool:
        return 0 < self.k < self.d

    @property
    def min_positive(self) -> float:
        """Smallest eigenvalue of ``M+`` (nan when ``k = 0``)."""
        return float(np.diag(self.Mplus).min()) if self.k else float("nan")

    @property
    def max_nonpositive(self) -> float:
        """Largest eigenvalue of ``M-`` (nan when ``k = d``)."""
        return float(np.diag(self.Mminus).max()) if self.k < self.d else float("nan")

    def reconstruct(self) -> np.ndarray:
        """``R^T (blockdiag(M+, M-) + skew part) R``, which should equal ``J``."""
        top = np.hstack([self.Mplus + self.Z1, self.Z2])
        bottom = np.hstack([-self.Z2.T, self.Mminus + self.Z3])
        return self.R.T @ np.vstack([top, bottom]) @ self.R


def rotated_block_form(J) -> RotatedBlockForm:
    M = _full(J)
    split = split_symmetric_skew(M)
    eig = symmetric_eig(split.S)
    k = int(np.sum(eig.values > ZERO_EIG_TOL))
    R = eig.R
    rot_skew = R @ split.A @ R.T
    rot_skew = 0.5 * (rot_skew - rot_skew.T)
    return RotatedBlockForm(
        R=R,
        Mplus=np.diag(eig.values[:k]),
        Mminus=np.diag(eig.values[k:]),
        Z1=rot_skew[:k, :k],
        Z2=rot_skew[:k, k:],
        Z3=rot_skew[k:, k:],
        k=k,
    )


@dataclass(frozen=True)
class CompressedMatrix:
    """``J_{v,w} = [[a, p + z], [conj(p) - conj(z), d]]`` for unit ``v``, ``w``."""

    matrix: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @property
    def a(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def d(self) -> float:
        return float(self.matrix[1, 1].real)

    def roots(self) -> np.ndarray:
        m = self.matrix
        return quadratic_roots(m[0, 0], m[1, 1], m[0, 1] * m[1, 0])


def compress_to_2x2(J: GameJacobian, v, w) -> CompressedMatrix:
    """Entries ``<J11 v, v>``, ``<J12 w, v>``, ``<J21 v, w>``, ``<J22 w, w>``.

    With ``<x, y> = y^* x``; the diagonal is real because ``J11`` and
    ``J22`` are symmetric.
    """
    v = np.asarray(v, dtype=complex).ravel()
    w = np.asarray(w, dtype=complex).ravel()
    if v.size != J.d1 or w.size != J.d2:
        raise ValueError("v and w must have lengths d1 and d2")
    if abs(np.linalg.norm(v) - 1) > UNIT_TOL or abs(np.linalg.norm(w) - 1) > UNIT_TOL:
        raise ValueError("v and w must be unit vectors")
    a, b, c, d = compress_batch(J, v[None, :], w[None, :])
    m = np.array([[a[0], b[0]], [c[0], d[0]]])
    return CompressedMatrix(m, v, w)


def compress_batch(J: GameJacobian, V: np.ndarray, W: np.ndarray):
    """Vectorized compressions for rows of ``V`` (n x d1) and ``W`` (n x d2).

    Returns the four entry arrays ``(a, b, c, d)`` of ``[[a, b], [c, d]]``.
    """
    Vc = V.conj()
    Wc = W.conj()
    a = np.einsum("ni,ij,nj->n", Vc, J.J11, V).real
    d = np.einsum("ni,ij,nj->n", Wc, J.J22, W).real
    b = np.einsum("ni,ij,nj->n", Vc, J.J12, W)
    c = np.einsum("ni,ij,nj->n", Wc, J.J21, V)
    return a.astype(complex), b, c, d.astype(complex)


def quadratic_roots(a, d, bc):
    """Roots of ``l^2 - l (a + d) + a d - bc = 0`` without cancellation.

    The larger-magnitude root comes from the quadratic formula with the
    sign matching the trace; the other from the product of roots.
    """
    a = np.asarray(a, dtype=complex)
    d = np.asarray(d, dtype=complex)
    bc = np.asarray(bc, dtype=complex)
    tr = a + d
    det = a * d - bc
    sq = np.sqrt((a - d) ** 2 + 4 * bc)
    plus, minus = tr + sq, tr - sq
    big = np.where(np.abs(plus) >= np.abs(minus), plus, minus) / 2
    safe = np.where(big == 0, 1, big)
    small = np.where(big == 0, 0, det / safe)
    return np.stack([big, small], axis=-1)


def characteristic_residual(a, d, bc, lam):
    """Value of the 2x2 characteristic polynomial at ``lam``."""
    return lam ** 2 - lam * (a + d) + a * d - bc
