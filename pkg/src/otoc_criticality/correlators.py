"""Out-of-time-order and two-point correlators on a prepared frame.

F(t) = <W(t) V W(t) V> under an infinite-temperature, finite-beta, or
ground-state average; f(t) = <W(t) V> as the cheaper two-point probe.
Infinite-temperature traces are dimension-normalized (divided by D), which
reproduces the n^4 growth of the bare OTOC with the photon cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import EvolvedFrame, ThermalWeights
from .errors import FitDomainError, ParameterError, ResourceError

RESONANCE_SUM_MAX_DIM = 40


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid over [t_start, t_end] with spacing dt (units 1/omega0)."""

    t_start: float = 0.0
    t_end: float = 500.0
    dt: float = 0.1

    def __post_init__(self):
        if self.t_start < 0 or self.t_end <= self.t_start or self.dt <= 0:
            raise ParameterError(
                f"invalid time grid: start={self.t_start} end={self.t_end} dt={self.dt}"
            )
        if self.num_samples < 2:
            raise ParameterError("time grid must contain at least 2 samples")

    @property
    def num_samples(self) -> int:
        return int(np.floor((self.t_end - self.t_start) / self.dt + 1e-9)) + 1

    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.num_samples)


@dataclass(frozen=True)
class TimeSeries:
    """Correlator samples on a TimeGrid.

    ``normalization`` records the raw t = 0 value used as the divisor when
    ``normalized`` is set (and is still reported otherwise).
    """

    grid: TimeGrid
    values: np.ndarray
    kind: str
    normalized: bool
    normalization: float
    beta: float | None = None


@dataclass(frozen=True)
class ExpFit:
    """Least-squares exponential-decay fit of log(values) over a time window."""

    lambda_L: float
    intercept: float
    window: tuple[float, float]
    r_squared: float


def _uniform_weights(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / dim)


def _raw_otoc_at_zero(frame: EvolvedFrame, weights: np.ndarray) -> float:
    A0 = frame.W_eig @ frame.V_eig
    return float(np.real(np.einsum("a,ab,ba->", weights, A0, A0)))


def _finish(values, grid, kind, normalize, raw_zero, beta=None) -> TimeSeries:
    if normalize:
        values = values / raw_zero
    return TimeSeries(
        grid=grid,
        values=values,
        kind=kind,
        normalized=bool(normalize),
        normalization=raw_zero,
        beta=beta,
    )


def otoc_infinite_temperature(frame: EvolvedFrame, grid: TimeGrid,
                              normalize: bool = True) -> TimeSeries:
    """F(t) = (1/D) tr[(W(t) V)^2]; real for Hermitian W = V."""
    w = _uniform_weights(frame.dim)
    values = kernels.otoc_weighted_series(
        frame.W_eig, frame.V_eig, frame.spectral.eigenvalues, w, grid.times()
    )
    return _finish(values, grid, "otoc_inf_temp", normalize,
                   _raw_otoc_at_zero(frame, w), beta=0.0)


def otoc_thermal(frame: EvolvedFrame, weights: ThermalWeights, grid: TimeGrid,
                 normalize: bool = True) -> TimeSeries:
    """F_beta(t) = sum_a w_a [W(t) V W(t) V]_aa, normalized by F_beta(0)."""
    if weights.dim != frame.dim:
        raise ParameterError(
            f"weights dimension {weights.dim} != frame dimension {frame.dim}"
        )
    values = kernels.otoc_weighted_series(
        frame.W_eig, frame.V_eig, frame.spectral.eigenvalues,
        weights.weights, grid.times()
    )
    return _finish(values, grid, "otoc_thermal", normalize,
                   _raw_otoc_at_zero(frame, weights.weights), beta=weights.beta)


def otoc_equilibrium(frame: EvolvedFrame, psi: np.ndarray, grid: TimeGrid,
                     normalize: bool = False) -> TimeSeries:
    """F_eq(t) = <psi| W(t) V W(t) V |psi> with psi given in the eigenbasis
    of H (as returned by dynamics.ground_state). Values stay complex; the
    real part drives plots and averages."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (frame.dim,):
        raise ParameterError(f"state must have shape ({frame.dim},), got {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ParameterError("state must be normalized to unit norm")
    values = kernels.equilibrium_series(
        frame.W_eig, frame.V_eig, frame.spectral.eigenvalues, psi, grid.times()
    )
    A0psi = frame.W_eig @ (frame.V_eig @ psi)
    raw_zero = float(np.real(np.vdot(psi, frame.W_eig @ (frame.V_eig @ A0psi))))
    return _finish(values, grid, "otoc_equilibrium", normalize, raw_zero)


def tpc_infinite_temperature(frame: EvolvedFrame, grid: TimeGrid,
                             normalize: bool = True) -> TimeSeries:
    """f(t) = (1/D) tr[W(t) V]."""
    values = kernels.tpc_series(
        frame.W_eig, frame.V_eig, frame.spectral.eigenvalues, grid.times(),
        prefactor=1.0 / frame.dim,
    )
    raw_zero = float(np.real(np.trace(frame.W_eig @ frame.V_eig))) / frame.dim
    return _finish(values, grid, "tpc_inf_temp", normalize, raw_zero, beta=0.0)


def time_average(series: TimeSeries) -> float:
    """Trapezoidal average of the real part over the series' grid."""
    t = series.grid.times()
    if t.shape[0] < 2:
        raise ParameterError("time average needs at least 2 samples")
    v = np.real(series.values)
    return float(np.trapezoid(v, t) / (t[-1] - t[0]))


def otoc_exact_time_average(frame: EvolvedFrame, mode: str = "generic_spectrum",
                            freq_tol: float = 1e-9) -> float:
    """Infinite-time average of the dimension-normalized infinite-temperature
    OTOC (the diagonal-ensemble limit of the windowed average).

    generic_spectrum keeps the index patterns (b=a, d=c) and (b=c, d=a),
    valid when no accidental gap resonances exist. resonance_sum sums every
    (a,b,c,d) with |E_a - E_b + E_c - E_d| <= freq_tol * max|E|; O(D^4), so
    it is limited to D <= 40.
    """
    W, V = frame.W_eig, frame.V_eig
    D = frame.dim
    if mode == "generic_spectrum":
        dW = np.diag(W)
        dV = np.diag(V)
        term1 = np.einsum("a,ac,c,ca->", dW, V, dW, V)
        term2 = np.einsum("ab,b,ba,a->", W, dV, W, dV)
        term3 = np.sum((dW * dV) ** 2)
        return float(np.real(term1 + term2 - term3) / D)
    if mode == "resonance_sum":
        if D > RESONANCE_SUM_MAX_DIM:
            raise ResourceError(
                f"resonance_sum is O(D^4); D={D} exceeds {RESONANCE_SUM_MAX_DIM}"
            )
        E = frame.spectral.eigenvalues
        scale = max(float(np.max(np.abs(E))), 1.0)
        gaps = E[:, None] - E[None, :]  # gaps[a,b] = E_a - E_b
        resonant = (
            np.abs(gaps[:, :, None, None] + gaps[None, None, :, :])
            <= freq_tol * scale
        )
        T = np.einsum("ab,bc,cd,da->abcd", W, V, W, V)
        return float(np.real(np.sum(T[resonant])) / D)
    raise ParameterError(f"unknown mode {mode!r}")


def fit_exponential_decay(series: TimeSeries, window: tuple[float, float]) -> ExpFit:
    """OLS of log(real(values)) against t inside the window; lambda_L = -slope."""
    t_lo, t_hi = float(window[0]), float(window[1])
    if not t_lo < t_hi:
        raise ParameterError(f"invalid window {window}")
    t = series.grid.times()
    mask = (t >= t_lo - 1e-12) & (t <= t_hi + 1e-12)
    if int(mask.sum()) < 3:
        raise ParameterError("fit window must contain at least 3 samples")
    v = np.real(series.values)[mask]
    if np.any(v <= 0):
        raise FitDomainError(
            "non-positive correlator values inside the fit window; "
            "choose an earlier window"
        )
    x = t[mask]
    y = np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return ExpFit(lambda_L=float(-slope), intercept=float(intercept),
                  window=(t_lo, t_hi), r_squared=float(r2))
