"""Scalar spectral factorization ``f = |f+|^2`` with ``f+`` outer.

The outer factor is ``exp`` of the analytic completion of ``log(f)/2``: on the
grid this is the cepstral (log-FFT) construction, the discrete counterpart of
the Herglotz-kernel integral representation of ``f+``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EIG_FLOOR,
    SpectralDensityMatrix,
    check_paley_wiener,
    coeffs_to_grid,
    grid_to_coeffs,
    trig_interpolate,
)
from .errors import InputError, NotFactorizableError

__all__ = ["ScalarFactor", "scalar_factorize", "outer_from_log_density"]

RHO_MAX = 1e-6


@dataclass(frozen=True)
class ScalarFactor:
    """Coefficients ``c_0..c_M`` of the outer factor of a scalar density.

    ``residual`` is the relative L1 grid error ``||f+|^2 - f|_1 / |f|_1`` of
    the truncated coefficient sequence; ``accurate`` is False when it exceeds
    the requested bound.
    """

    coeffs: np.ndarray
    residual: float
    accurate: bool = True
    oversample: int = 1

    @property
    def max_coeff(self) -> int:
        return len(self.coeffs) - 1


def outer_from_log_density(log_f: np.ndarray) -> np.ndarray:
    """Grid values of ``exp(g)`` where ``Re g = log_f / 2`` and ``g`` is analytic.

    ``g`` keeps the nonnegative cepstral coefficients of ``log_f / 2`` doubled
    (the constant and Nyquist terms are not doubled).
    """
    k = log_f.shape[0]
    cep = np.fft.fft(log_f, axis=0) / k
    g = np.zeros_like(cep)
    g[0] = 0.5 * cep[0]
    g[1:k // 2] = cep[1:k // 2]
    g[k // 2] = 0.5 * cep[k // 2]
    return np.exp(np.fft.ifft(g, axis=0) * k)


def _as_density(f) -> np.ndarray:
    if isinstance(f, SpectralDensityMatrix):
        if f.dim != 1:
            raise InputError(f"scalar factorization needs a 1x1 density, got dimension {f.dim}")
        return f.values[:, 0, 0].real.copy()
    arr = np.asarray(f)
    if np.iscomplexobj(arr):
        if np.any(np.abs(arr.imag) > 1e-10 * max(np.abs(arr).max(), 1e-300)):
            raise InputError("scalar density must be real")
        arr = arr.real
    arr = np.array(arr, dtype=float).reshape(-1)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise InputError("scalar density must be finite and nonnegative")
    return arr


def scalar_factorize(f, max_coeff: int = 64, oversample: int = 4,
                     rho_max: float = RHO_MAX) -> ScalarFactor:
    """Outer spectral factor of a nonnegative density sampled on the grid.

    Parameters
    ----------
    f : array_like or SpectralDensityMatrix
        K nonnegative samples (K a power of two) or a 1x1 density.
    max_coeff : int
        Highest Fourier coefficient returned; must be below K/2.
    oversample : int
        The density is trigonometrically interpolated onto a grid this many
        times finer before taking logarithms, which suppresses cepstral
        aliasing for densities with near-zeros. Interpolated values that
        dip below the eigenvalue floor are clamped to it.
    rho_max : float
        Residual bound above which the result is marked inaccurate.

    Returns
    -------
    ScalarFactor
        Coefficients normalised so that ``c_0`` is real and positive.

    Raises
    ------
    NotFactorizableError
        If the log-integrability condition fails after eigenvalue flooring.
    """
    dens = _as_density(f)
    S = SpectralDensityMatrix(dens)
    pw = check_paley_wiener(S)
    if not pw.satisfied:
        raise NotFactorizableError(
            f"density fails the Paley-Wiener condition (mean log density {pw.log_det_mean})"
        )
    k = dens.shape[0]
    if not 0 <= max_coeff < k // 2:
        raise InputError(f"max_coeff={max_coeff} must lie in [0, {k // 2})")
    floor = EIG_FLOOR * dens.max()
    floored = np.maximum(dens, floor)

    fine = floored
    if oversample > 1:
        fine = np.maximum(trig_interpolate(floored, oversample).real, floor)

    fplus = outer_from_log_density(np.log(fine))
    coeffs = grid_to_coeffs(fplus, max_coeff)
    phase = coeffs[0] / abs(coeffs[0])
    coeffs = coeffs * np.conj(phase)
    coeffs[0] = abs(coeffs[0])

    recon = np.abs(coeffs_to_grid(coeffs, k)) ** 2
    residual = float(np.sum(np.abs(recon - dens)) / np.sum(dens))
    return ScalarFactor(coeffs, residual, residual <= rho_max, max(int(oversample), 1))
