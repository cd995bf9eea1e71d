"""Autocovariance and spectral density estimation.

Empirical estimators work on :class:`~spectral_granger.core.MultichannelSeries`;
:class:`VarModel` supplies the analytic spectrum and autocovariances used as
ground truth in tests and verification fixtures.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Literal

import numpy as np
import scipy.linalg
import scipy.signal

from .core import (
    AutocovarianceSequence,
    FrequencyGrid,
    MultichannelSeries,
    SpectralDensityMatrix,
    coeffs_to_grid,
    hermitian_part,
)
from .errors import InsufficientDataError, InvalidConfigError, StabilityError

__all__ = [
    "EstimatorConfig",
    "VarModel",
    "detrend",
    "dpss_tapers",
    "estimate_autocovariance",
    "estimate_psd",
    "var_psd",
    "var_autocovariance",
]

METHODS = ("welch", "blackman_tukey", "multitaper")
DETRENDS = ("none", "mean", "linear")


@dataclass(frozen=True)
class EstimatorConfig:
    """Spectral estimator settings.

    ``segment_length`` and ``max_lag`` default to values derived from the grid
    size and the series length when left as ``None``.
    """

    method: Literal["welch", "blackman_tukey", "multitaper"] = "multitaper"
    segment_length: int | None = None
    overlap_fraction: float = 0.5
    max_lag: int | None = None
    taper_bandwidth_product: float = 4.0
    taper_count: int = 7
    detrend: Literal["none", "mean", "linear"] = "mean"
    regularization: float = 0.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.detrend not in DETRENDS:
            raise InvalidConfigError(f"unknown detrend {self.detrend!r}; expected one of {DETRENDS}")
        if not 0.0 <= self.overlap_fraction < 1.0:
            raise InvalidConfigError("overlap_fraction must lie in [0, 1)")
        if self.segment_length is not None and self.segment_length < 2:
            raise InvalidConfigError("segment_length must be at least 2")
        if self.max_lag is not None and self.max_lag < 0:
            raise InvalidConfigError("max_lag must be nonnegative")
        if self.regularization < 0:
            raise InvalidConfigError("regularization must be nonnegative")
        if self.method == "multitaper":
            if self.taper_bandwidth_product <= 0:
                raise InvalidConfigError("taper_bandwidth_product must be positive")
            if not 1 <= self.taper_count <= int(np.floor(2 * self.taper_bandwidth_product)):
                raise InvalidConfigError(
                    f"taper_count={self.taper_count} must be in [1, floor(2*NW)] "
                    f"for NW={self.taper_bandwidth_product}"
                )

    def resolved_segment_length(self, n_samples: int, grid: FrequencyGrid) -> int:
        return self.segment_length if self.segment_length is not None else min(n_samples, grid.size)

    def resolved_max_lag(self, n_samples: int, grid: FrequencyGrid) -> int:
        return self.max_lag if self.max_lag is not None else min(n_samples - 1, grid.size // 4)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class VarModel:
    """Stable vector autoregression ``x_t = sum_k A_k x_{t-k} + e_t``, ``e_t ~ (0, noise_cov)``."""

    coeff_matrices: np.ndarray
    noise_cov: np.ndarray

    def __post_init__(self):
        cov = np.atleast_2d(np.array(self.noise_cov, dtype=float))
        d = cov.shape[0]
        a = np.array(self.coeff_matrices, dtype=float)
        if a.size == 0:
            a = np.zeros((0, d, d))
        elif a.ndim == 0 or (a.ndim == 1 and d == 1):
            a = a.reshape(-1, 1, 1)
        elif a.ndim == 2:
            a = a[None]
        if cov.shape != (d, d) or a.shape[1:] != (d, d):
            raise InvalidConfigError(f"incompatible shapes: A {a.shape}, noise_cov {cov.shape}")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(np.abs(cov).max(), 1.0)):
            raise InvalidConfigError("noise_cov must be symmetric")
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise InvalidConfigError("noise_cov must be positive definite")
        eig = self.companion_eigenvalues(a)
        if eig.size and np.max(np.abs(eig)) >= 1.0:
            raise StabilityError(
                f"VAR model is not stable: companion spectral radius {np.max(np.abs(eig)):.6g} >= 1",
                eigenvalues=eig,
            )
        a.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "coeff_matrices", a)
        object.__setattr__(self, "noise_cov", cov)

    @property
    def dim(self) -> int:
        return self.noise_cov.shape[0]

    @property
    def order(self) -> int:
        return self.coeff_matrices.shape[0]

    def companion(self, a: np.ndarray | None = None) -> np.ndarray:
        a = self.coeff_matrices if a is None else a
        r, d = a.shape[0], a.shape[1]
        comp = np.zeros((r * d, r * d))
        comp[:d] = np.concatenate(list(a), axis=1)
        comp[d:, :-d] = np.eye((r - 1) * d)
        return comp

    def companion_eigenvalues(self, a: np.ndarray | None = None) -> np.ndarray:
        a = self.coeff_matrices if a is None else a
        if a.shape[0] == 0:
            return np.zeros(0)
        return np.linalg.eigvals(self.companion(a))


def detrend(data: np.ndarray, kind: str = "mean") -> np.ndarray:
    """Remove the per-channel mean or least-squares line along the last axis."""
    if kind == "none":
        return np.array(data, dtype=float)
    if kind == "mean":
        return data - data.mean(axis=-1, keepdims=True)
    if kind == "linear":
        return scipy.signal.detrend(data, axis=-1, type="linear")
    raise InvalidConfigError(f"unknown detrend {kind!r}")


def estimate_autocovariance(series: MultichannelSeries, max_lag: int) -> AutocovarianceSequence:
    """Biased sample autocovariances ``c_m = (1/T) sum_n x_{n+m} x_n^T``.

    The series is used as given; detrend beforehand if required.
    """
    x = series.data
    t = series.length
    if max_lag >= t:
        raise InsufficientDataError(f"max_lag={max_lag} requires more than {t} samples")
    out = np.empty((max_lag + 1, series.dim, series.dim))
    for m in range(max_lag + 1):
        out[m] = x[:, m:] @ x[:, : t - m].T / t
    return AutocovarianceSequence(out)


def dpss_tapers(length: int, nw: float, count: int) -> np.ndarray:
    """Discrete prolate spheroidal sequences, shape (count, length), unit energy.

    The tapers are the leading eigenvectors of the symmetric tridiagonal
    matrix commuting with the time-bandwidth concentration operator.
    Sign convention: even-order tapers have positive sum, odd-order tapers a
    positive first moment about the centre.
    """
    if count > length:
        raise InvalidConfigError(f"cannot build {count} tapers of length {length}")
    n = np.arange(length)
    w = nw / length
    diag = ((length - 1 - 2 * n) / 2.0) ** 2 * np.cos(2 * np.pi * w)
    off = n[1:] * (length - n[1:]) / 2.0
    _, vec = scipy.linalg.eigh_tridiagonal(
        diag, off, select="i", select_range=(length - count, length - 1)
    )
    tapers = vec[:, ::-1].T.copy()
    centre = n - (length - 1) / 2.0
    for k in range(count):
        ref = tapers[k].sum() if k % 2 == 0 else (centre * tapers[k]).sum()
        if ref < 0:
            tapers[k] *= -1
    tapers /= np.linalg.norm(tapers, axis=1, keepdims=True)
    return tapers


def _segment_starts(n_samples: int, seg: int, overlap: float) -> np.ndarray:
    step = max(1, seg - int(round(overlap * seg)))
    return np.arange(0, n_samples - seg + 1, step)


def _analytic_dft(x: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """``sum_n x[..., n] exp(+i n theta_k)`` for every grid point, leading axis = grid."""
    k = grid.size
    length = x.shape[-1]
    nfft = k * -(-length // k)
    out = np.fft.ifft(x, n=nfft, axis=-1) * nfft
    out = out[..., :: nfft // k]
    return np.moveaxis(out, -1, 0)


def _tapered_psd(x: np.ndarray, windows: np.ndarray, seg: int, overlap: float,
                 grid: FrequencyGrid) -> np.ndarray:
    d, t = x.shape
    total = np.zeros((grid.size, d, d), dtype=complex)
    starts = _segment_starts(t, seg, overlap)
    for s in starts:
        block = x[:, s:s + seg]
        # (K, n_windows, d)
        y = _analytic_dft(windows[:, None, :] * block[None, :, :], grid)
        total += np.einsum("kwi,kwj->kij", y, y.conj())
    return total / (len(starts) * windows.shape[0])


def _parzen_lag_window(max_lag: int) -> np.ndarray:
    u = np.arange(max_lag + 1) / (max_lag + 1)
    return np.where(u <= 0.5, 1 - 6 * u**2 + 6 * u**3, 2 * (1 - u) ** 3)


def estimate_psd(series: MultichannelSeries, cfg: EstimatorConfig | None = None,
                 grid: FrequencyGrid | None = None) -> SpectralDensityMatrix:
    """Estimate the spectral density matrix of ``series`` on ``grid``.

    Parameters
    ----------
    series : MultichannelSeries
        Real observations, d channels by T samples.
    cfg : EstimatorConfig, optional
        Estimator settings; defaults to multitaper with NW=4 and 7 tapers on
        half-overlapping segments of ``grid.size`` samples.
    grid : FrequencyGrid, optional
        Output grid, 1024 points by default.

    Returns
    -------
    SpectralDensityMatrix
        Normalised so that the grid average of ``S`` approximates the lag-0
        autocovariance (white noise of variance s2 has ``S == s2``).

    Notes
    -----
    Welch uses a Hann window, multitaper averages the DPSS eigenspectra over
    segments as well as tapers, and Blackman-Tukey applies a Parzen lag
    window to the biased autocovariances. Each estimate is positive
    semidefinite by construction.
    """
    cfg = EstimatorConfig() if cfg is None else cfg
    grid = FrequencyGrid() if grid is None else grid
    x = detrend(series.data, cfg.detrend)
    t = series.length

    if cfg.method == "blackman_tukey":
        max_lag = cfg.resolved_max_lag(t, grid)
        acov = estimate_autocovariance(MultichannelSeries(x, series.channel_names), max_lag)
        w = _parzen_lag_window(max_lag)
        coeffs = acov.values * w[:, None, None]
        pos = coeffs_to_grid(coeffs, grid)
        values = pos + np.conj(np.swapaxes(pos, 1, 2)) - coeffs[0]
    else:
        seg = cfg.resolved_segment_length(t, grid)
        if seg > t:
            raise InsufficientDataError(f"segment_length={seg} exceeds series length {t}")
        if cfg.method == "welch":
            win = scipy.signal.get_window("hann", seg, fftbins=False)[None, :]
            win = win / np.linalg.norm(win)
        else:
            win = dpss_tapers(seg, cfg.taper_bandwidth_product, cfg.taper_count)
        values = _tapered_psd(x, win, seg, cfg.overlap_fraction, grid)

    values = hermitian_part(values)
    if cfg.regularization > 0:
        d = series.dim
        level = np.mean(np.trace(values, axis1=1, axis2=2).real) / d
        values = values + cfg.regularization * level * np.eye(d)
    return SpectralDensityMatrix(values, grid)


def _transfer_function(model: VarModel, grid: FrequencyGrid) -> np.ndarray:
    # Lag polynomial evaluated at z = exp(+i theta), matching
    # S(theta) = sum_m c_m exp(i m theta) with c_m = E[x_{t+m} x_t^T].
    d = model.dim
    theta = grid.theta
    lag_poly = np.broadcast_to(np.eye(d, dtype=complex), (grid.size, d, d)).copy()
    for k, a in enumerate(model.coeff_matrices, start=1):
        lag_poly -= np.exp(1j * k * theta)[:, None, None] * a
    return np.linalg.inv(lag_poly)


def var_psd(model: VarModel, grid: FrequencyGrid | None = None) -> SpectralDensityMatrix:
    """Analytic spectral density ``H Sigma H^*`` of a stable VAR model."""
    grid = FrequencyGrid() if grid is None else grid
    h = _transfer_function(model, grid)
    return SpectralDensityMatrix(h @ model.noise_cov @ h.conj().transpose(0, 2, 1), grid)


def var_autocovariance(model: VarModel, max_lag: int) -> AutocovarianceSequence:
    """Exact autocovariances ``c_0..c_M`` of a stable VAR model.

    ``c_0..c_{r-1}`` come from the discrete Lyapunov equation of the companion
    form; higher lags follow the Yule-Walker recursion.
    """
    d, r = model.dim, model.order
    out = np.zeros((max_lag + 1, d, d))
    if r == 0:
        out[0] = model.noise_cov
        return AutocovarianceSequence(out)
    comp = model.companion()
    q = np.zeros((r * d, r * d))
    q[:d, :d] = model.noise_cov
    gamma = scipy.linalg.solve_discrete_lyapunov(comp, q)
    gamma = 0.5 * (gamma + gamma.T)
    for m in range(min(r, max_lag + 1)):
        # block (0, m) of the state covariance is E[x_t x_{t-m}^T] = c_m
        out[m] = gamma[:d, m * d:(m + 1) * d]
    for m in range(r, max_lag + 1):
        out[m] = sum(model.coeff_matrices[k - 1] @ out[m - k] for k in range(1, r + 1))
    return AutocovarianceSequence(out)
