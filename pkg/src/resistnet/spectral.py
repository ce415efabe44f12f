"""Symmetric-matrix kernels: inertia signatures, pseudoinverse, spectral norm.

Zero classification is relative: an eigenvalue counts as zero when
|lambda| <= tol * max(1, max_i |lambda_i|), with tol defaulting to 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = ["Signature", "DEFAULT_TOL", "signature_of", "pseudoinverse", "spectral_norm", "is_psd"]

DEFAULT_TOL = 1e-9

# relative asymmetry tolerated before the input is rejected outright
_SYMMETRY_RTOL = 1e-10


def _as_symmetric(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    if A.size == 0:
        return A
    scale = max(1.0, float(np.max(np.abs(A))))
    if float(np.max(np.abs(A - A.T))) > _SYMMETRY_RTOL * scale:
        raise InputError("matrix is not symmetric within 1e-10 relative tolerance")
    return 0.5 * (A + A.T)


def _zero_cut(eigvals: np.ndarray, tol: float) -> float:
    if eigvals.size == 0:
        return tol
    return tol * max(1.0, float(np.max(np.abs(eigvals))))


@dataclass(frozen=True)
class Signature:
    """Inertia (n_plus, n_minus, n_zero) of a symmetric matrix."""

    n_plus: int
    n_minus: int
    n_zero: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_plus, self.n_minus, self.n_zero)


def signature_of(A: np.ndarray, tol: float = DEFAULT_TOL) -> Signature:
    """Counts of positive, negative, and (relative-)zero eigenvalues."""
    A = _as_symmetric(A)
    if A.size == 0:
        return Signature(0, 0, 0)
    eigvals = np.linalg.eigvalsh(A)
    cut = _zero_cut(eigvals, tol)
    n_plus = int(np.sum(eigvals > cut))
    n_minus = int(np.sum(eigvals < -cut))
    return Signature(n_plus, n_minus, A.shape[0] - n_plus - n_minus)


def pseudoinverse(A: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via eigendecomposition (zeros dropped)."""
    A = _as_symmetric(A)
    if A.size == 0:
        return A.copy()
    eigvals, vecs = np.linalg.eigh(A)
    cut = _zero_cut(eigvals, tol)
    inv = np.where(np.abs(eigvals) > cut, 1.0 / np.where(eigvals == 0, 1.0, eigvals), 0.0)
    P = (vecs * inv) @ vecs.T
    return 0.5 * (P + P.T)


def spectral_norm(A: np.ndarray) -> float:
    """Largest singular value; zero for empty matrices."""
    A = np.asarray(A)
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def is_psd(A: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when no eigenvalue is below the relative zero threshold."""
    return signature_of(A, tol).n_minus == 0
