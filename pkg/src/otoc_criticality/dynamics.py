"""Spectral time evolution, thermal weights, and ground-state extraction.

One eigendecomposition per Hamiltonian amortizes over every time sample:
with W and V rotated into the eigenbasis, W(t) is element-wise phase
multiplication and all correlators reduce to dense products there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError
from .linalg import SpectralDecomposition, as_matrix, eigh


@dataclass(frozen=True)
class EvolvedFrame:
    """Eigendecomposition of H plus W and V rotated to the eigenbasis."""

    spectral: SpectralDecomposition
    W_eig: np.ndarray
    V_eig: np.ndarray

    @property
    def dim(self) -> int:
        return self.spectral.dim


@dataclass(frozen=True)
class ThermalWeights:
    """Normalized Boltzmann populations over eigenstates."""

    beta: float
    weights: np.ndarray

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def prepare_frame(H, W, V) -> EvolvedFrame:
    """Diagonalize H once and rotate W, V into its eigenbasis."""
    H = as_matrix(H)
    W = as_matrix(W)
    V = as_matrix(V)
    if not (H.shape == W.shape == V.shape):
        raise ShapeError(
            f"H, W, V must share a dimension, got {H.shape}, {W.shape}, {V.shape}"
        )
    spectral = eigh(H)
    return EvolvedFrame(
        spectral=spectral,
        W_eig=spectral.to_eigenbasis(W),
        V_eig=spectral.to_eigenbasis(V),
    )


def heisenberg_at(frame: EvolvedFrame, t: float) -> np.ndarray:
    """W(t) in the eigenbasis: W_ab e^{i(E_a - E_b)t}."""
    if not np.isfinite(t):
        raise ParameterError(f"time must be finite, got {t}")
    p = np.exp(1j * frame.spectral.eigenvalues * float(t))
    return frame.W_eig * np.outer(p, p.conj())


def thermal_weights(spectral: SpectralDecomposition, beta: float) -> ThermalWeights:
    """Boltzmann weights exp(-beta (E - E_min)) / Z, uniform at beta = 0.

    The max-shift keeps the exponentials finite for any beta and spectrum.
    """
    beta = float(beta)
    if beta < 0 or not np.isfinite(beta):
        raise ParameterError(f"beta must be finite and >= 0, got {beta}")
    E = spectral.eigenvalues
    w = np.exp(-beta * (E - E[0]))
    return ThermalWeights(beta=beta, weights=w / w.sum())


def ground_state(spectral: SpectralDecomposition) -> np.ndarray:
    """Lowest-eigenvalue eigenvector, unit norm."""
    psi = spectral.eigenvectors[:, 0].copy()
    return psi / np.linalg.norm(psi)


def ground_state_gap_degenerate(spectral: SpectralDecomposition,
                                rel_tol: float = 1e-10) -> bool:
    """True when the two lowest eigenvalues are closer than
    rel_tol * max|E| (parity doublet deep in the superradiant phase)."""
    E = spectral.eigenvalues
    if E.shape[0] < 2:
        return False
    scale = max(float(np.max(np.abs(E))), 1.0)
    return float(E[1] - E[0]) < rel_tol * scale
