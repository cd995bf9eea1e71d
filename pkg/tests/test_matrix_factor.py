import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_granger import (
    FactorizationConfig,
    FrequencyGrid,
    SpectralDensityMatrix,
    SpectralFactor,
    factor_residual,
    matrix_factorize,
    scalar_factorize,
    var_psd,
)
from spectral_granger.core import coeffs_to_grid, floored_eigh
from spectral_granger.errors import DimensionMismatchError, InputError, NonConvergenceError, NotFactorizableError
from spectral_granger.matrix_factor import normalize_factor, wilson_iteration

from conftest import fine_log_mean, random_poly_spectrum, random_scalar_poly_density, random_stable_var

THETA = FrequencyGrid(1024).theta


def const(m, K=64):
    return SpectralDensityMatrix(np.broadcast_to(np.asarray(m, dtype=float), (K,) + np.shape(m)))


def test_identity():
    F = matrix_factorize(const(np.eye(3)), max_coeff=4)
    np.testing.assert_allclose(F.coeffs[0], np.eye(3), atol=1e-14)
    np.testing.assert_allclose(F.coeffs[1:], 0, atol=1e-14)
    assert F.residual <= 1e-14


def test_diagonal_constant():
    F = matrix_factorize(const(np.diag([4.0, 1.0])), max_coeff=4)
    np.testing.assert_allclose(F.coeffs[0], np.diag([2.0, 1.0]), atol=1e-14)
    np.testing.assert_allclose(F.coeffs[1:], 0, atol=1e-14)


def test_known_analytic_factor():
    a = np.zeros((1024, 2, 2), dtype=complex)
    a[:, 0, 0] = a[:, 1, 1] = 1
    a[:, 0, 1] = 0.5 * np.exp(-1j * THETA)
    S = SpectralDensityMatrix(a @ a.conj().transpose(0, 2, 1))
    F = matrix_factorize(S)
    assert F.residual <= 1e-8
    assert abs(np.linalg.det(F.coeffs[0])) == pytest.approx(1.0, abs=1e-8)
    assert F.is_normalized()


def test_var1_factor_is_transfer_times_chol(var1):
    F = matrix_factorize(var_psd(var1))
    np.testing.assert_allclose(F.coeffs[0], np.eye(2), atol=1e-6)
    np.testing.assert_allclose(F.coeffs[1], var1.coeff_matrices[0], atol=1e-6)


def test_var_with_correlated_noise():
    rng = np.random.default_rng(3)
    model = random_stable_var(rng, 3, order=2)
    F = matrix_factorize(var_psd(model))
    chol = np.linalg.cholesky(model.noise_cov)
    np.testing.assert_allclose(F.coeffs[0], chol, atol=1e-6)
    np.testing.assert_allclose(F.coeffs[1], model.coeff_matrices[0] @ chol, atol=1e-6)
    np.testing.assert_allclose(F.innovation_covariance, model.noise_cov, atol=1e-6)


class TestFactorResidual:
    def test_exact(self):
        S = const(np.eye(2))
        assert factor_residual(S, SpectralFactor(np.eye(2)[None])) <= 1e-14

    def test_scaled(self):
        S = const(np.eye(2))
        assert factor_residual(S, SpectralFactor(2 * np.eye(2)[None])) == pytest.approx(3.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            factor_residual(const(np.eye(2)), SpectralFactor(np.eye(3)[None]))


def test_not_factorizable():
    with pytest.raises(NotFactorizableError):
        matrix_factorize(SpectralDensityMatrix(np.zeros((64, 2, 2))), max_coeff=4)


def test_non_convergence_carries_residual():
    S = random_poly_spectrum(np.random.default_rng(0), 3, 4)
    with pytest.raises(NonConvergenceError) as exc:
        matrix_factorize(S, max_iter=1)
    assert exc.value.iterations == 1 and exc.value.residual > 0


def test_max_coeff_bound():
    with pytest.raises(InputError):
        matrix_factorize(const(np.eye(2), K=16), max_coeff=8)


def test_config_validation():
    with pytest.raises(InputError):
        FactorizationConfig(oversample=3)
    with pytest.raises(InputError):
        FactorizationConfig(tol=0)


def test_normalize_factor_removes_right_unitary():
    rng = np.random.default_rng(1)
    c = rng.standard_normal((5, 3, 3)) + 1j * rng.standard_normal((5, 3, 3))
    u = scipy.stats.unitary_group.rvs(3, random_state=2)
    a, b = normalize_factor(c), normalize_factor(c @ u)
    np.testing.assert_allclose(a, b, atol=1e-12)
    assert SpectralFactor(a).is_normalized()


def test_wilson_returns_grid_factor():
    S = random_poly_spectrum(np.random.default_rng(5), 2, 3, K=256)
    psi, it, res = wilson_iteration(S.values)
    assert res <= 1e-9 and it > 0
    np.testing.assert_allclose(psi @ psi.conj().transpose(0, 2, 1), S.values, atol=1e-8 * np.abs(S.values).max())


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(0, 4), st.integers(0, 2**31 - 1))
def test_factorization_and_determinant_identity(d, degree, seed):
    S = random_poly_spectrum(np.random.default_rng(seed), d, degree)
    F = matrix_factorize(S)
    assert F.residual <= 1e-8
    detc0 = abs(np.linalg.det(F.coeffs[0])) ** 2
    assert detc0 == pytest.approx(np.exp(fine_log_mean(S.values)), rel=1e-6)
    assert F.is_normalized()


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 3), st.integers(0, 2**31 - 1))
def test_unitary_congruence(d, seed):
    rng = np.random.default_rng(seed)
    S = random_poly_spectrum(rng, d, 3)
    u = scipy.stats.unitary_group.rvs(d, random_state=rng.integers(2**31))
    F = matrix_factorize(S)
    G = matrix_factorize(S.congruence(u))
    assert G.residual <= 1e-8
    # U F is an outer factor of U S U^*; the canonical one differs by a right unitary
    np.testing.assert_allclose(G.coeffs, normalize_factor(u @ F.coeffs), atol=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_scalar_delegation_and_forced_wilson(seed):
    f = random_scalar_poly_density(np.random.default_rng(seed), 6)
    S = SpectralDensityMatrix(f)
    ref = scalar_factorize(f, 64).coeffs
    auto = matrix_factorize(S).coeffs[:, 0, 0]
    forced = matrix_factorize(S, method="wilson").coeffs[:, 0, 0]
    np.testing.assert_allclose(auto, ref, atol=1e-14)
    np.testing.assert_allclose(forced, ref, atol=1e-8)


def test_degenerate_direction_robustness():
    # det S vanishes at theta = 0 and pi; one eigenvalue is floored there
    K = 1024
    tol = 1e-9
    a = np.zeros((K, 2, 2), dtype=complex)
    a[:, 0, 0] = 1 - np.exp(1j * THETA)
    a[:, 1, 1] = 1 - np.exp(1j * (THETA - np.pi))
    a[:, 1, 0] = 0.3
    S = SpectralDensityMatrix(a @ a.conj().transpose(0, 2, 1))
    eig = np.linalg.eigvalsh(S.values)
    assert eig[:, 0].min() < 1e-12 * eig.max()

    lam, vec, _ = floored_eigh(S.values)
    floored = (vec * lam[:, None, :]) @ vec.conj().transpose(0, 2, 1)
    _, _, res = wilson_iteration(floored, tol=tol)
    assert res <= 10 * tol

    F = matrix_factorize(S, max_coeff=K // 2 - 1, tol=tol)
    # the inverse factor is unbounded at the zeros, so the first K/2
    # coefficients only approximate S; regression pin with 4x oversampling
    assert F.truncated
    assert F.residual <= 3e-6


def test_on_grid_matches_coeffs_to_grid():
    F = matrix_factorize(random_poly_spectrum(np.random.default_rng(8), 2, 2))
    np.testing.assert_array_equal(F.on_grid(FrequencyGrid(1024)), coeffs_to_grid(F.coeffs, 1024))
