import numpy as np
import pytest

from spectral_granger import FrequencyGrid, SpectralDensityMatrix, VarModel
from spectral_granger.core import coeffs_to_grid

VAR1_A = np.array([[0.5, 0.4], [0.0, 0.7]])


@pytest.fixture
def var1():
    return VarModel([VAR1_A], np.eye(2))


@pytest.fixture
def ar1():
    return VarModel([[[0.5]]], [[1.0]])


@pytest.fixture
def grid():
    return FrequencyGrid(1024)


def random_poly_spectrum(rng, d, degree, K=1024, eps=1e-3):
    """S = Q Q^* + eps I with Q a complex matrix polynomial of the given degree.

    Coefficients are complex Gaussian scaled so each entry of Q(theta) has unit
    mean square.
    """
    q = (rng.standard_normal((degree + 1, d, d)) + 1j * rng.standard_normal((degree + 1, d, d)))
    q /= np.sqrt(2 * (degree + 1))
    qg = coeffs_to_grid(q, K)
    return SpectralDensityMatrix(qg @ qg.conj().transpose(0, 2, 1) + eps * np.eye(d))


def random_scalar_poly_density(rng, degree, K=1024, eps=1e-3):
    q = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    q /= np.sqrt(2 * (degree + 1))
    return np.abs(coeffs_to_grid(q, K)) ** 2 + eps


def random_stable_var(rng, d, order=1, radius=0.9):
    while True:
        a = rng.standard_normal((order, d, d)) * 0.5 / np.sqrt(d * order)
        comp = np.zeros((order * d, order * d))
        comp[:d] = np.concatenate(list(a), axis=1)
        comp[d:, :-d] = np.eye((order - 1) * d)
        if np.max(np.abs(np.linalg.eigvals(comp))) < radius:
            b = rng.standard_normal((d, d))
            return VarModel(a, b @ b.T + 0.5 * np.eye(d))


def fine_log_mean(values, factor=64):
    """Mean of log f (or log det S) over a grid ``factor`` times finer.

    Exact trigonometric interpolation is used, so for band-limited densities
    this evaluates the continuous integral to round-off, free of the
    discretization error of the coarse-grid mean.
    """
    from spectral_granger.core import hermitian_part, trig_interpolate

    fine = trig_interpolate(np.asarray(values), factor)
    if fine.ndim == 1:
        return float(np.mean(np.log(fine.real)))
    return float(np.mean(np.linalg.slogdet(hermitian_part(fine))[1]))
