"""Dense spectral primitives.

These are thin wrappers over LAPACK (via numpy) with the conventions the
rest of the package relies on: spectra sorted deterministically, symmetric
eigenvalues in descending order with eigenvectors stored as rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

HURWITZ_TOL = 1e-9


def _check_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with multiplicity, sorted by real part then imaginary part."""

    eigenvalues: np.ndarray

    def __len__(self):
        return self.eigenvalues.size

    def __iter__(self):
        return iter(self.eigenvalues)

    @property
    def max_real(self) -> float:
        return float(np.max(self.eigenvalues.real))

    @property
    def radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def marginal(self, tol: float = HURWITZ_TOL) -> np.ndarray:
        """Eigenvalues on the imaginary axis to within ``tol``."""
        return self.eigenvalues[np.abs(self.eigenvalues.real) <= tol]

    def is_real(self, tol: float = 1e-8) -> bool:
        return bool(np.all(np.abs(self.eigenvalues.imag) <= tol))


def eigenvalues(M) -> Spectrum:
    M = _check_square(M)
    try:
        lam = np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    lam = np.asarray(lam, dtype=complex)
    order = np.lexsort((lam.imag, lam.real))
    lam = lam[order]
    lam.setflags(write=False)
    return Spectrum(lam)


@dataclass(frozen=True)
class SymmetricEigenDecomposition:
    """``M = R^T diag(values) R`` with ``values`` descending and ``R`` orthogonal."""

    values: np.ndarray
    R: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.R.T @ np.diag(self.values) @ self.R


def symmetric_eig(M, tol: float = 1e-8) -> SymmetricEigenDecomposition:
    M = _check_square(M)
    if M.size and np.max(np.abs(M - M.T)) > tol:
        raise ValueError("symmetric_eig needs a symmetric matrix")
    try:
        w, V = np.linalg.eigh(0.5 * (M + M.T))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    return SymmetricEigenDecomposition(w[order], V[:, order].T)


def spectral_norm(M) -> float:
    """Largest singular value (0 for empty matrices)."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return float(np.linalg.norm(M, 2))


def spectral_radius(M) -> float:
    return eigenvalues(M).radius


def is_hurwitz(s, tol: float = HURWITZ_TOL) -> bool:
    """True iff every eigenvalue has real part below ``-tol``.

    Accepts a :class:`Spectrum` or a square matrix.
    """
    if not isinstance(s, Spectrum):
        s = eigenvalues(s)
    return s.max_real < -tol


def stability_label(s, tol: float = HURWITZ_TOL) -> str:
    """``"stable"``, ``"marginal"`` (eigenvalue within tol of the axis) or ``"unstable"``."""
    if not isinstance(s, Spectrum):
        s = eigenvalues(s)
    m = s.max_real
    if m < -tol:
        return "stable"
    if m <= tol:
        return "marginal"
    return "unstable"


def is_negative_definite(M, tol: float = HURWITZ_TOL) -> bool:
    M = _check_square(M)
    return bool(np.linalg.eigvalsh(0.5 * (M + M.T)).max() < -tol)
