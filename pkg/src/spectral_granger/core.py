"""Shared domain types, the frequency grid and grid <-> coefficient transforms.

Conventions used throughout the package:

* The circle is discretised by ``theta_k = 2*pi*k/K``, ``k = 0..K-1``.
* Grid averages stand in for ``(1/2pi) * integral(... dtheta)``, so the
  zeroth Fourier coefficient of a white-noise spectrum is the noise variance.
* ``c_n{f} = mean_k f(theta_k) exp(-i n theta_k)`` and a spectral density
  matrix relates to the autocovariances ``c_m = E[x_{t+m} x_t^*]`` through
  ``S(theta) = sum_m c_m exp(i m theta)``.
* Arrays of matrix-valued functions have shape ``(K, d, d)``; frequency is
  always the leading axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatchError, GridTooCoarseError, InputError

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
EIG_FLOOR = 1e-12

__all__ = [
    "FrequencyGrid",
    "MultichannelSeries",
    "AutocovarianceSequence",
    "SpectralDensityMatrix",
    "SpectralFactor",
    "PaleyWienerResult",
    "grid_to_coeffs",
    "coeffs_to_grid",
    "check_paley_wiener",
    "floored_eigh",
    "trig_interpolate",
    "hermitian_part",
]


def hermitian_part(values: np.ndarray) -> np.ndarray:
    return 0.5 * (values + np.conj(np.swapaxes(values, -1, -2)))


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid of ``size`` points on [0, 2pi); size must be a power of two."""

    size: int = 1024

    def __post_init__(self):
        k = self.size
        if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
            raise InputError(f"grid size must be an integer, got {k!r}")
        if k < 2 or (k & (k - 1)) != 0:
            raise InputError(f"grid size must be a power of two >= 2, got {k}")

    @property
    def theta(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    def __len__(self):
        return self.size


@dataclass(frozen=True)
class MultichannelSeries:
    """Real observations, ``data`` of shape (d channels, T samples)."""

    data: np.ndarray
    channel_names: tuple[str, ...] = ()
    sample_interval: float = 1.0

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim == 1:
            data = data[None, :]
        if data.ndim != 2:
            raise InputError("series data must be a (channels, samples) matrix")
        d, t = data.shape
        if d < 1 or t < 2:
            raise InputError(f"need at least 1 channel and 2 samples, got {d}x{t}")
        if not np.all(np.isfinite(data)):
            raise InputError("series contains non-finite values")
        names = tuple(self.channel_names) or tuple(f"x{j + 1}" for j in range(d))
        if len(names) != d:
            raise InputError(f"{len(names)} channel names for {d} channels")
        if len(set(names)) != d:
            raise InputError(f"channel names must be unique: {names}")
        if not self.sample_interval > 0:
            raise InputError("sample_interval must be positive")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "channel_names", names)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def length(self) -> int:
        return self.data.shape[1]

    def index_of(self, names: Sequence[str]) -> list[int]:
        lookup = {n: i for i, n in enumerate(self.channel_names)}
        missing = [n for n in names if n not in lookup]
        if missing:
            raise InputError(f"unknown channel(s): {', '.join(missing)}")
        return [lookup[n] for n in names]


@dataclass(frozen=True)
class AutocovarianceSequence:
    """Matrix autocovariances ``c_m = E[x_{t+m} x_t^*]`` for ``m = 0..max_lag``.

    Negative lags follow from ``c_{-m} = c_m^*``.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None, None]
        if vals.ndim != 3 or vals.shape[1] != vals.shape[2]:
            raise InputError("autocovariances must have shape (max_lag+1, d, d)")
        c0 = vals[0]
        scale = max(np.linalg.norm(c0), np.finfo(float).tiny)
        if np.linalg.norm(c0 - c0.conj().T) > HERMITIAN_TOL * scale:
            raise InputError("lag-0 autocovariance is not Hermitian")
        eig = np.linalg.eigvalsh(hermitian_part(c0))
        if eig[0] < -PSD_TOL * max(eig[-1], 0.0) - 1e-300:
            raise InputError("lag-0 autocovariance is not positive semidefinite")
        vals[0] = hermitian_part(c0)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def max_lag(self) -> int:
        return self.values.shape[0] - 1

    def lag(self, m: int) -> np.ndarray:
        if m >= 0:
            return self.values[m]
        return self.values[-m].conj().T

    def block_toeplitz(self, n_blocks: int, channels: Sequence[int] | None = None) -> np.ndarray:
        """Gram matrix of ``(x_0, x_{-1}, ..., x_{-(n_blocks-1)})``.

        Block (i, j) is ``E[x_{-i} x_{-j}^*] = c_{j-i}``.
        """
        if n_blocks - 1 > self.max_lag:
            raise InputError(f"need max_lag >= {n_blocks - 1}, have {self.max_lag}")
        idx = list(range(self.dim)) if channels is None else list(channels)
        p = len(idx)
        gram = np.empty((n_blocks * p, n_blocks * p), dtype=complex)
        for i in range(n_blocks):
            for j in range(n_blocks):
                gram[i * p:(i + 1) * p, j * p:(j + 1) * p] = self.lag(j - i)[np.ix_(idx, idx)]
        return gram

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.values.imag) <= 1e-12 * max(np.abs(self.values).max(), 1e-300)))


def _check_hermitian_psd(values: np.ndarray) -> None:
    diff = np.linalg.norm(values - np.conj(np.swapaxes(values, 1, 2)), axis=(1, 2))
    norms = np.linalg.norm(values, axis=(1, 2))
    bad = np.nonzero(diff > HERMITIAN_TOL * norms)[0]
    if bad.size:
        raise InputError(f"spectral density is not Hermitian at grid index {bad[0]}")
    eig = np.linalg.eigvalsh(hermitian_part(values))
    bad = np.nonzero(eig[:, 0] < -PSD_TOL * np.maximum(eig[:, -1], 0.0))[0]
    if bad.size:
        raise InputError(
            f"spectral density is not positive semidefinite at grid index {bad[0]} "
            f"(smallest eigenvalue {eig[bad[0], 0]:.3e})"
        )


@dataclass(frozen=True)
class SpectralDensityMatrix:
    """Hermitian PSD matrix function sampled on a :class:`FrequencyGrid`.

    ``values`` has shape (K, d, d); a (K,) array is read as a scalar density.
    Construction validates the Hermitian/PSD tolerances and stores the exact
    Hermitian part.
    """

    values: np.ndarray
    grid: FrequencyGrid = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim == 1:
            vals = vals[:, None, None]
        if vals.ndim != 3 or vals.shape[1] != vals.shape[2]:
            raise InputError("spectral density must have shape (K, d, d)")
        grid = self.grid if self.grid is not None else FrequencyGrid(vals.shape[0])
        if grid.size != vals.shape[0]:
            raise DimensionMismatchError(f"{vals.shape[0]} samples for a grid of {grid.size}")
        if not np.all(np.isfinite(vals)):
            raise InputError("spectral density contains non-finite values")
        _check_hermitian_psd(vals)
        vals = hermitian_part(vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "grid", grid)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def submatrix(self, channels: Sequence[int]) -> "SpectralDensityMatrix":
        """Principal submatrix: the joint density of the selected channels."""
        idx = list(channels)
        if not idx or min(idx) < 0 or max(idx) >= self.dim:
            raise InputError(f"channel indices {idx} out of range for dimension {self.dim}")
        return SpectralDensityMatrix(self.values[:, idx][:, :, idx], self.grid)

    def congruence(self, matrix: np.ndarray) -> "SpectralDensityMatrix":
        """Spectrum of the transformed process ``T x``: ``T S(theta) T^*``."""
        t = np.asarray(matrix)
        return SpectralDensityMatrix(t @ self.values @ t.conj().T, self.grid)

    def autocovariance(self, max_lag: int) -> AutocovarianceSequence:
        return AutocovarianceSequence(grid_to_coeffs(self.values, max_lag))


@dataclass(frozen=True)
class SpectralFactor:
    """Fourier coefficients ``c_n{S+}``, ``n = 0..M``, of an analytic factor.

    ``residual`` is the relative reconstruction error against the density the
    factor was computed from (NaN when unknown); ``truncated`` flags a last
    coefficient that is not negligible relative to the first.
    """

    coeffs: np.ndarray
    residual: float = float("nan")
    iterations: int = 0
    truncated: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[:, None, None]
        if c.ndim == 2 and c.shape[0] == c.shape[1]:
            c = c[None]
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise InputError("factor coefficients must have shape (M+1, d, d)")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def max_coeff(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def innovation_covariance(self) -> np.ndarray:
        c0 = self.coeffs[0]
        return c0 @ c0.conj().T

    def is_normalized(self, tol: float = 1e-8) -> bool:
        """True when ``det c_0`` is real and nonnegative within ``tol``."""
        det = np.linalg.det(self.coeffs[0])
        return bool(abs(det.imag) <= tol * max(abs(det), 1.0) and det.real >= -tol)

    def on_grid(self, grid: FrequencyGrid) -> np.ndarray:
        return coeffs_to_grid(self.coeffs, grid)


def grid_to_coeffs(values: np.ndarray, max_coeff: int) -> np.ndarray:
    """Fourier coefficients ``c_0..c_M`` of grid samples (leading axis = grid).

    Uses the trapezoidal rule on the uniform grid, which is exact for
    trigonometric polynomials of degree < K - M.
    """
    vals = np.asarray(values)
    k = vals.shape[0]
    if max_coeff < 0:
        raise InputError("max_coeff must be nonnegative")
    if max_coeff >= k:
        raise GridTooCoarseError(f"cannot extract {max_coeff + 1} coefficients from a {k}-point grid")
    return np.fft.fft(vals, axis=0)[: max_coeff + 1] / k


def coeffs_to_grid(coeffs: np.ndarray, grid: FrequencyGrid | int) -> np.ndarray:
    """Evaluate ``sum_n c_n exp(i n theta_k)`` at every grid point."""
    k = grid.size if isinstance(grid, FrequencyGrid) else int(grid)
    c = np.asarray(coeffs, dtype=complex)
    n = c.shape[0]
    if n > k:
        # e^{i n theta_k} is K-periodic in n: fold the excess onto the grid.
        reps = -(-n // k)
        padded = np.zeros((reps * k,) + c.shape[1:], dtype=complex)
        padded[:n] = c
        c = padded.reshape((reps, k) + c.shape[1:]).sum(axis=0)
    return np.fft.ifft(c, n=k, axis=0) * k


def trig_interpolate(values: np.ndarray, factor: int) -> np.ndarray:
    """Trigonometric interpolation of K periodic samples onto a K*factor grid.

    The Nyquist coefficient is split evenly between +K/2 and -K/2, so real
    (Hermitian) inputs stay real (Hermitian) and the original grid points are
    reproduced exactly.
    """
    vals = np.asarray(values)
    if factor == 1:
        return vals.astype(complex)
    k = vals.shape[0]
    kf = k * factor
    c = np.fft.fft(vals, axis=0) / k
    big = np.zeros((kf,) + vals.shape[1:], dtype=complex)
    h = k // 2
    big[:h] = c[:h]
    big[kf - h + 1:] = c[h + 1:]
    big[h] = 0.5 * c[h]
    big[kf - h] = 0.5 * c[h]
    return np.fft.ifft(big, axis=0) * kf


def floored_eigh(values: np.ndarray, rel_floor: float = EIG_FLOOR):
    """Eigendecomposition of Hermitian grid samples with eigenvalues floored.

    Eigenvalues below ``rel_floor * (largest eigenvalue over the grid)`` are
    clamped to that floor. Returns ``(eigenvalues, eigenvectors, floor)``.
    """
    eig, vec = np.linalg.eigh(hermitian_part(np.asarray(values)))
    floor = rel_floor * max(float(eig.max()), 0.0)
    return np.maximum(eig, floor), vec, floor


class PaleyWienerResult(NamedTuple):
    satisfied: bool
    log_det_mean: float


def check_paley_wiener(S: SpectralDensityMatrix, log_floor: float | None = None) -> PaleyWienerResult:
    """Grid version of the log-integrability condition on ``det S``.

    ``log_det_mean`` is the grid average of ``log det S`` after eigenvalue
    flooring. The condition holds when it exceeds ``log_floor``. By default
    that is the value for a spectrum with one direction on the eigenvalue
    floor everywhere and the rest at the largest eigenvalue,
    ``(d - 1) * log(lam_max) + log(EIG_FLOOR * lam_max)``, so a density that
    is singular on the whole circle fails while isolated zeros pass.
    """
    eig, _, floor = floored_eigh(S.values)
    if floor <= 0.0:
        return PaleyWienerResult(False, float("-inf"))
    log_det_mean = float(np.mean(np.sum(np.log(eig), axis=1)))
    if log_floor is None:
        log_floor = (S.dim - 1) * np.log(floor / EIG_FLOOR) + np.log(floor)
    return PaleyWienerResult(bool(np.isfinite(log_det_mean) and log_det_mean > log_floor), log_det_mean)
