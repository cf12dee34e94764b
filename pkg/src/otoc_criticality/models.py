"""Rabi and Dicke Hamiltonians, derived critical quantities, and the
parity operator.

Units: omega0 = 1 fixes the scale in all default configurations; times are
in 1/omega0 and frequencies in omega0. The frequency ratio eta = Omega/omega0
plays the role of a thermodynamic-limit parameter; gamma = eta * N governs
criticality at finite atom number.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import operators
from .errors import ParameterError
from .linalg import hermitize


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of a single Rabi/Dicke instance.

    Derived quantities (eta, gamma, g_c) are recomputed on access and never
    stored, so they cannot go stale.
    """

    omega0: float = 1.0
    Omega: float = 1.0
    g: float = 0.0
    n: int = 80  # photon cutoff (Fock-space dimension)
    N: int = 1   # atom count; collective spin j = N/2

    def __post_init__(self):
        if self.omega0 <= 0 or self.Omega <= 0:
            raise ParameterError("omega0 and Omega must be positive")
        if self.g < 0:
            raise ParameterError("coupling g must be non-negative")
        if int(self.n) < 2:
            raise ParameterError(f"photon cutoff must be >= 2, got {self.n}")
        if int(self.N) < 1:
            raise ParameterError(f"atom count must be >= 1, got {self.N}")

    @property
    def eta(self) -> float:
        return self.Omega / self.omega0

    @property
    def gamma(self) -> float:
        return self.Omega * self.N / self.omega0

    @property
    def g_c(self) -> float:
        return critical_coupling(self.omega0, self.Omega)

    @property
    def dim(self) -> int:
        return self.n * (self.N + 1)

    def at_ratio(self, ratio: float) -> "ModelParams":
        """Copy of the parameters with g = ratio * g_c."""
        return replace(self, g=float(ratio) * self.g_c)


def critical_coupling(omega0: float, Omega: float) -> float:
    """g_c = sqrt(omega0 * Omega) / 2."""
    if omega0 <= 0 or Omega <= 0:
        raise ParameterError("omega0 and Omega must be positive")
    return float(np.sqrt(omega0 * Omega) / 2.0)


def build_rabi(params: ModelParams) -> np.ndarray:
    """H = omega0 a^dag a + (Omega/2) sigma_z + g (a^dag + a) sigma_x.

    Dimension 2n; the single atom is the N = 1 collective spin with
    sigma_z = 2 Jz and sigma_x = J+ + J-.
    """
    if params.N != 1:
        raise ParameterError(f"Rabi model requires N == 1, got N={params.N}")
    return build_dicke(params)


def build_dicke(params: ModelParams) -> np.ndarray:
    """H = omega0 a^dag a + Omega Jz + (g/sqrt(2j)) (a^dag + a) (J+ + J-).

    Dimension n*(N+1); reduces to the Rabi Hamiltonian at N = 1.
    """
    n, N = params.n, params.N
    a = operators.annihilation(n)
    num = operators.number_operator(n)
    Jz, Jp, Jm = operators.collective_spin(N)
    eye_atom = np.eye(N + 1, dtype=np.complex128)
    eye_light = np.eye(n, dtype=np.complex128)
    H = (
        params.omega0 * operators.embed(num, eye_atom, n, N)
        + params.Omega * operators.embed(eye_light, Jz, n, N)
        + (params.g / np.sqrt(N)) * operators.embed(a + a.conj().T, Jp + Jm, n, N)
    )
    return hermitize(H)


def parity_diagonal(n: int, N: int) -> np.ndarray:
    """Diagonal of the parity operator in the composite basis.

    Entry for photon number k and atom basis slot s (m = j - s) is
    (-1)^(k + m + j) = (-1)^(k + N + s); at N = 1 this is the familiar
    (-1)^(k + (1+sigma_z)/2).
    """
    k = np.arange(int(n))
    s = np.arange(int(N) + 1)
    signs = ((-1.0) ** (k[:, None] + int(N) + s[None, :])).ravel()
    return signs


def build_parity(n: int, N: int) -> np.ndarray:
    """Parity operator Pi = exp{i pi (a^dag a + Jz + j)} as a dense matrix.

    Hermitian, unitary, Pi^2 = I; commutes with both Hamiltonians."""
    return np.diag(parity_diagonal(n, N)).astype(np.complex128)


def order_parameter_operator(n: int, N: int) -> np.ndarray:
    """a^dag a embedded in the composite space (the order parameter W = V)."""
    num = operators.number_operator(n)
    return operators.embed(num, np.eye(N + 1, dtype=np.complex128), n, N)
