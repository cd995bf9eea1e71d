import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_granger import (
    SpectralFactor,
    grouped_prediction_error,
    joint_prediction_error,
    matrix_factorize,
    scalar_factorize,
    scalar_prediction_error,
    var_autocovariance,
    var_psd,
)
from spectral_granger.errors import InputError, InsufficientCoefficientsError
from spectral_granger.oracle import finite_history_error
from spectral_granger.scalar_factor import ScalarFactor

from conftest import random_poly_spectrum


def scalar(coeffs):
    return ScalarFactor(np.asarray(coeffs, dtype=complex), 0.0)


class TestScalar:
    def test_white(self):
        assert scalar_prediction_error(scalar([2.0, 0, 0, 0]), 3).value == 2.0

    def test_ar1(self):
        F = scalar(0.5 ** np.arange(20))
        assert scalar_prediction_error(F, 1).value == pytest.approx(1.0)
        assert scalar_prediction_error(F, 2).value == pytest.approx(np.sqrt(1.25))

    def test_ar1_from_density_against_oracle(self, ar1):
        F = scalar_factorize(var_psd(ar1), 32)
        e2 = scalar_prediction_error(F, 2).value
        acov = var_autocovariance(ar1, 70)
        assert e2 == pytest.approx(finite_history_error(acov, [0], [0], 2, 64), rel=1e-3)

    def test_insufficient(self):
        with pytest.raises(InsufficientCoefficientsError):
            scalar_prediction_error(scalar([1.0, 0.5]), 3)

    @pytest.mark.parametrize("L", [0, -1, 1.5])
    def test_bad_lag(self, L):
        with pytest.raises(InputError):
            scalar_prediction_error(scalar([1.0, 0.5]), L)


class TestJoint:
    def test_identity(self):
        assert joint_prediction_error(SpectralFactor(np.eye(3)[None]), 1).value == pytest.approx(np.sqrt(3))

    def test_diag(self):
        c = np.zeros((6, 2, 2))
        c[0] = np.diag([2.0, 1.0])
        assert joint_prediction_error(SpectralFactor(c), 5).value == pytest.approx(np.sqrt(5))

    def test_var1(self, var1):
        F = matrix_factorize(var_psd(var1))
        e = joint_prediction_error(F, 2)
        assert e.value == pytest.approx(np.sqrt(2.9), abs=1e-6)
        assert sum(b**2 for b in e.breakdown) == pytest.approx(e.squared, rel=1e-14)


class TestGrouped:
    def test_identity(self):
        c = np.zeros((3, 2, 2))
        c[0] = np.eye(2)
        assert grouped_prediction_error(SpectralFactor(c), [0], 3).value == pytest.approx(1.0)

    def test_var1(self, var1):
        F = matrix_factorize(var_psd(var1))
        assert grouped_prediction_error(F, [0], 1).value == pytest.approx(1.0, abs=1e-6)
        assert grouped_prediction_error(F, [0], 2).value == pytest.approx(np.sqrt(1.41), abs=1e-6)

    def test_var1_against_oracle(self, var1):
        F = matrix_factorize(var_psd(var1))
        acov = var_autocovariance(var1, 70)
        for L in (1, 2, 4):
            assert grouped_prediction_error(F, [0], L).value == pytest.approx(
                finite_history_error(acov, [0, 1], [0], L, 64), rel=1e-3)
            assert joint_prediction_error(F, L).value == pytest.approx(
                finite_history_error(acov, [0, 1], [0, 1], L, 64), rel=1e-3)

    @pytest.mark.parametrize("targets", [[], [2], [0, 0]])
    def test_invalid_targets(self, targets):
        with pytest.raises(InputError):
            grouped_prediction_error(SpectralFactor(np.eye(2)[None]), targets, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_invariants(d, seed):
    rng = np.random.default_rng(seed)
    S = random_poly_spectrum(rng, d, 3)
    F = matrix_factorize(S, max_coeff=32)
    total = np.mean(np.trace(S.values, axis1=1, axis2=2).real)
    values = [joint_prediction_error(F, L).value for L in range(1, 33)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] ** 2 <= total + 1e-8
    for L in (1, 3, 7):
        assert grouped_prediction_error(F, range(d), L).value == joint_prediction_error(F, L).value
    # right-unitary invariance
    u = scipy.stats.unitary_group.rvs(d, random_state=rng.integers(2**31)) if d > 1 else np.array([[1j]])
    G = SpectralFactor(F.coeffs @ u)
    for L in (1, 4):
        assert joint_prediction_error(G, L).value == pytest.approx(joint_prediction_error(F, L).value, rel=1e-12)
        assert grouped_prediction_error(G, [0], L).value == pytest.approx(
            grouped_prediction_error(F, [0], L).value, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_scalar_consistency(seed):
    rng = np.random.default_rng(seed)
    S = random_poly_spectrum(rng, 1, 4)
    sf = scalar_factorize(S, 16)
    mf = SpectralFactor(sf.coeffs[:, None, None])
    for L in (1, 2, 5):
        assert joint_prediction_error(mf, L).value == scalar_prediction_error(sf, L).value
