"""Dense complex linear algebra: Hermitian checks, products, Kronecker
products, and the eigendecomposition every correlator is built on.

Matrices are plain ``numpy.ndarray`` of complex128. Dimensions in scope
stay below ~720, so everything is dense and double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import HermiticityError, NumericalError, ShapeError

HERMITICITY_TOL = 1e-12
HERMITIZE_INPUT_TOL = 1e-8


def as_matrix(A) -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting non-finite entries."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={M.ndim}")
    if not np.all(np.isfinite(M)):
        raise ShapeError("matrix contains NaN or Inf entries")
    return M


def matmul(A, B) -> np.ndarray:
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise ShapeError(f"matmul shape mismatch: {A.shape} x {B.shape}")
    return A @ B


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def trace(A) -> complex:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"trace requires a square matrix, got {A.shape}")
    return complex(np.trace(A))


def hermiticity_defect(A: np.ndarray) -> float:
    """max |A - A^dagger| relative to 1 + max |A|."""
    A = as_matrix(A)
    scale = 1.0 + float(np.max(np.abs(A))) if A.size else 1.0
    return float(np.max(np.abs(A - A.conj().T))) / scale


def is_hermitian(A: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    A = as_matrix(A)
    return A.shape[0] == A.shape[1] and hermiticity_defect(A) <= tol


def hermitize(A) -> np.ndarray:
    """Return (A + A^dagger)/2, rejecting inputs that are not already
    Hermitian to within ``HERMITIZE_INPUT_TOL`` (a large defect signals a
    bug upstream, not roundoff)."""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"hermitize requires a square matrix, got {A.shape}")
    if hermiticity_defect(A) > HERMITIZE_INPUT_TOL:
        raise HermiticityError(
            f"matrix is not Hermitian within tolerance "
            f"(defect {hermiticity_defect(A):.3e} > {HERMITIZE_INPUT_TOL:.0e})"
        )
    return (A + A.conj().T) / 2.0


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending real eigenvalues and the unitary of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def to_eigenbasis(self, A: np.ndarray) -> np.ndarray:
        """Rotate an operator into the eigenbasis: U^dagger A U."""
        U = self.eigenvectors
        return np.ascontiguousarray(U.conj().T @ as_matrix(A) @ U)


def eigh(H) -> SpectralDecomposition:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        raise ShapeError(f"eigh requires a square matrix, got {H.shape}")
    if not is_hermitian(H, tol=HERMITIZE_INPUT_TOL):
        raise HermiticityError("eigh input is not Hermitian within tolerance")
    try:
        E, U = scipy.linalg.eigh(H)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericalError(f"Hermitian eigensolver failed: {exc}") from exc
    return SpectralDecomposition(
        eigenvalues=np.ascontiguousarray(E),
        eigenvectors=np.ascontiguousarray(U.astype(np.complex128)),
    )
