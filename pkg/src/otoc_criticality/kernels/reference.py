"""Pure-numpy reference implementations of the correlator kernels.

All operators arrive already rotated to the eigenbasis of H, so Heisenberg
evolution is element-wise phase multiplication: W(t)_ab = W_ab e^{i(E_a-E_b)t}.
Time samples are processed in chunks to bound the (T, D, D) temporaries.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 64


def otoc_weighted_series(W, V, energies, weights, times):
    """F(t) = sum_a w_a [W(t) V W(t) V]_aa for each t.

    With A(t) = W(t) V this is sum_ab w_a A_ab A_ba, one matrix product per
    sample. Uniform weights 1/D give the dimension-normalized
    infinite-temperature OTOC.
    """
    W = np.asarray(W, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    E = np.asarray(energies, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    out = np.empty(times.shape[0], dtype=np.complex128)
    for lo in range(0, times.shape[0], _CHUNK):
        t = times[lo : lo + _CHUNK]
        phases = np.exp(1j * np.outer(t, E))  # (T, D)
        B = W[None, :, :] * phases[:, :, None] * phases.conj()[:, None, :]
        A = B @ V
        out[lo : lo + t.shape[0]] = np.einsum("a,tab,tba->t", w, A, A, optimize=True)
    return out


def tpc_series(W, V, energies, times, prefactor=1.0):
    """f(t) = prefactor * sum_ab W_ab e^{i(E_a-E_b)t} V_ba for each t."""
    W = np.asarray(W, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    E = np.asarray(energies, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    C = prefactor * (W * V.T)  # C_ab = W_ab V_ba
    out = np.empty(times.shape[0], dtype=np.complex128)
    for lo in range(0, times.shape[0], _CHUNK):
        t = times[lo : lo + _CHUNK]
        phases = np.exp(1j * np.outer(t, E))
        out[lo : lo + t.shape[0]] = np.einsum(
            "ta,ab,tb->t", phases, C, phases.conj(), optimize=True
        )
    return out


def equilibrium_series(W, V, energies, psi, times):
    """F_eq(t) = <psi| W(t) V W(t) V |psi> for each t.

    Uses A(t) psi = p * (W (conj(p) * (V psi))) and the matching row vector,
    three matrix-vector products per sample instead of a matrix product.
    """
    W = np.asarray(W, dtype=np.complex128)
    V = np.asarray(V, dtype=np.complex128)
    E = np.asarray(energies, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.complex128)
    times = np.asarray(times, dtype=np.float64)
    y = V @ psi
    out = np.empty(times.shape[0], dtype=np.complex128)
    for i, t in enumerate(times):
        p = np.exp(1j * E * t)
        A_psi = p * (W @ (p.conj() * y))
        row = (p.conj() * ((psi.conj() * p) @ W)) @ V  # psi^dag W(t) V
        out[i] = row @ A_psi
    return out
