"""L-lag prediction errors read off the Fourier coefficients of a spectral factor.

For an outer factor with coefficients ``c_n``, the squared error of predicting
a channel ``j`` ``L`` steps ahead from the whole past of every channel is the
squared norm of row ``j`` of ``c_0, ..., c_{L-1}``. Errors are reported as
norms (standard-deviation units).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import SpectralFactor
from .errors import InputError, InsufficientCoefficientsError
from .scalar_factor import ScalarFactor

__all__ = [
    "PredictionError",
    "scalar_prediction_error",
    "joint_prediction_error",
    "grouped_prediction_error",
]


@dataclass(frozen=True)
class PredictionError:
    """Prediction error at one lag; ``breakdown[j]**2`` sums to ``value**2``."""

    lag: int
    value: float
    breakdown: tuple[float, ...]

    @property
    def squared(self) -> float:
        return self.value ** 2


def _check_lag(L: int, available: int) -> None:
    if not isinstance(L, (int, np.integer)) or L < 1:
        raise InputError(f"lag must be a positive integer, got {L!r}")
    if L > available:
        raise InsufficientCoefficientsError(f"lag {L} needs {L} coefficients, factor has {available}")


def scalar_prediction_error(F: ScalarFactor, L: int) -> PredictionError:
    coeffs = np.asarray(F.coeffs)
    _check_lag(L, coeffs.shape[0])
    value = float(np.sqrt(np.cumsum(np.abs(coeffs) ** 2)[L - 1]))
    return PredictionError(int(L), value, (value,))


def _rows_error(F: SpectralFactor, L: int, rows: Sequence[int]) -> PredictionError:
    power = np.abs(F.coeffs[:, list(rows), :]) ** 2
    # one running sum over all stored lags, so the error is exactly
    # nondecreasing in L whatever the rounding
    value = float(np.sqrt(np.cumsum(power.sum(axis=(1, 2)))[L - 1]))
    breakdown = np.sqrt(np.sum(power[:L], axis=(0, 2)))
    return PredictionError(int(L), value, tuple(map(float, breakdown)))


def joint_prediction_error(F: SpectralFactor, L: int) -> PredictionError:
    """Error of predicting every channel from the past of every channel."""
    _check_lag(L, F.coeffs.shape[0])
    return _rows_error(F, L, range(F.dim))


def grouped_prediction_error(F: SpectralFactor, target_channels: Sequence[int], L: int) -> PredictionError:
    """Error of predicting ``target_channels`` from the past of all channels.

    ``F`` must be the factor of the full joint spectrum.
    """
    targets = list(target_channels)
    if not targets:
        raise InputError("target channel set is empty")
    if min(targets) < 0 or max(targets) >= F.dim:
        raise InputError(f"target channels {targets} out of range for dimension {F.dim}")
    if len(set(targets)) != len(targets):
        raise InputError(f"duplicate target channels {targets}")
    _check_lag(L, F.coeffs.shape[0])
    return _rows_error(F, L, targets)
