"""Truncated bosonic operators, collective spin operators, and their
embedding into the composite light (x) atom space.

Conventions, fixed once and asserted in tests:
  * Fock basis |0> ... |n-1>, hard truncation at the cutoff n.
  * Collective spin basis |j, m> ordered by descending m = j ... -j, so the
    g = 0 ground state (m = -j) is the last basis vector.
  * Composite ordering kron(light, atom): the light index is the slow one.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError, ShapeError


def _check_cutoff(n: int) -> int:
    n = int(n)
    if n < 2:
        raise ParameterError(f"photon cutoff must be >= 2, got {n}")
    return n


def _check_atoms(N: int) -> int:
    N = int(N)
    if N < 1:
        raise ParameterError(f"atom count must be >= 1, got {N}")
    return N


def annihilation(n: int) -> np.ndarray:
    """Truncated annihilation operator a: a[k-1, k] = sqrt(k)."""
    n = _check_cutoff(n)
    a = np.zeros((n, n), dtype=np.complex128)
    k = np.arange(1, n)
    a[k - 1, k] = np.sqrt(k)
    return a


def number_operator(n: int) -> np.ndarray:
    """Photon number operator diag(0, 1, ..., n-1)."""
    n = _check_cutoff(n)
    return np.diag(np.arange(n, dtype=np.float64)).astype(np.complex128)


def collective_spin(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Collective spin operators (Jz, J+, J-) for N atoms, j = N/2.

    Basis |j, m> with m descending; (J+)[idx(m+1), idx(m)] = sqrt((j-m)(j+m+1)).
    """
    N = _check_atoms(N)
    j = N / 2.0
    m = j - np.arange(N + 1)  # descending
    Jz = np.diag(m).astype(np.complex128)
    Jp = np.zeros((N + 1, N + 1), dtype=np.complex128)
    # raising m -> m+1 moves one slot up in the descending ordering
    for idx in range(1, N + 1):
        mm = m[idx]
        Jp[idx - 1, idx] = np.sqrt((j - mm) * (j + mm + 1.0))
    Jm = Jp.conj().T.copy()
    return Jz, Jp, Jm


def embed(light_op: np.ndarray, atom_op: np.ndarray, n: int, N: int) -> np.ndarray:
    """kron(light_op, atom_op) on the composite space of dimension n*(N+1)."""
    n = _check_cutoff(n)
    N = _check_atoms(N)
    light_op = np.asarray(light_op, dtype=np.complex128)
    atom_op = np.asarray(atom_op, dtype=np.complex128)
    if light_op.shape != (n, n):
        raise ShapeError(f"light operator must be {n}x{n}, got {light_op.shape}")
    if atom_op.shape != (N + 1, N + 1):
        raise ShapeError(f"atom operator must be {N + 1}x{N + 1}, got {atom_op.shape}")
    return np.kron(light_op, atom_op)
