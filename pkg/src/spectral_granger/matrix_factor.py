"""Matrix spectral factorization ``S = S+ S+^*`` with ``S+`` outer.

The factor is computed with Wilson's Newton-type iteration

    psi <- psi [psi^{-1} S psi^{-*} + I]_+

where ``[.]_+`` keeps the Fourier coefficients of positive index, and the
lower-triangular half (diagonal halved) of the constant coefficient. The
iteration converges quadratically to the outer factor.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .core import (
    EIG_FLOOR,
    SpectralDensityMatrix,
    SpectralFactor,
    check_paley_wiener,
    coeffs_to_grid,
    grid_to_coeffs,
    hermitian_part,
    trig_interpolate,
)
from .errors import DimensionMismatchError, InputError, NonConvergenceError, NotFactorizableError
from .scalar_factor import scalar_factorize

__all__ = [
    "FactorizationConfig",
    "matrix_factorize",
    "factor_residual",
    "normalize_factor",
    "wilson_iteration",
    "factorize_with_config",
]

CONDITION_CAP = 1e12
TRUNCATION_TOL = 1e-6


@dataclass(frozen=True)
class FactorizationConfig:
    max_coeff: int = 64
    tol: float = 1e-9
    max_iter: int = 200
    oversample: int = 4

    def __post_init__(self):
        if self.max_coeff < 0:
            raise InputError("max_coeff must be nonnegative")
        if not self.tol > 0:
            raise InputError("tol must be positive")
        if self.max_iter < 1:
            raise InputError("max_iter must be at least 1")
        if self.oversample < 1 or (self.oversample & (self.oversample - 1)):
            raise InputError("oversample must be a power of two")

    def to_dict(self) -> dict:
        return asdict(self)


def _ctrans(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def _plus_operator(g: np.ndarray) -> np.ndarray:
    k, d, _ = g.shape
    beta = np.fft.fft(g, axis=0) / k
    const = np.tril(beta[0])
    const[np.diag_indices(d)] *= 0.5
    beta[0] = const
    beta[k // 2 + 1:] = 0
    beta[k // 2] *= 0.5
    return np.fft.ifft(beta, axis=0) * k


def _grid_residual(psi: np.ndarray, S: np.ndarray, scale: float) -> float:
    return float(np.linalg.norm(psi @ _ctrans(psi) - S, axis=(1, 2)).max() / scale)


def wilson_iteration(S: np.ndarray, tol: float = 1e-9, max_iter: int = 200):
    """Run Wilson's iteration on grid samples ``S`` of shape (K, d, d).

    Returns ``(psi, iterations, residual)`` with ``psi`` the factor's grid
    values. Stops when both the relative change of the iterate and the grid
    reconstruction residual are at most ``tol``. By Parseval the relative
    change on the grid equals the relative change of the coefficients.
    """
    k, d, _ = S.shape
    eye = np.eye(d)
    scale = float(np.linalg.norm(S, axis=(1, 2)).max())
    c0 = hermitian_part(S.mean(axis=0))
    try:
        psi = np.broadcast_to(np.linalg.cholesky(c0), S.shape).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError("grid average of S is not positive definite") from exc
    residual = _grid_residual(psi, S, scale)
    change = np.inf
    for it in range(1, max_iter + 1):
        try:
            x = np.linalg.solve(psi, np.broadcast_to(eye, S.shape))
        except np.linalg.LinAlgError as exc:
            raise NonConvergenceError("singular iterate", residual, it) from exc
        g = x @ S @ _ctrans(x) + eye
        new = psi @ _plus_operator(g)
        change = float(np.linalg.norm(new - psi) / np.linalg.norm(new))
        psi = new
        residual = _grid_residual(psi, S, scale)
        if not np.isfinite(residual):
            raise NonConvergenceError("iteration diverged", residual, it)
        if change <= tol and residual <= tol:
            return psi, it, residual
    raise NonConvergenceError(
        f"Wilson iteration did not reach tol={tol:g} in {max_iter} iterations "
        f"(residual {residual:.3e}, change {change:.3e})",
        residual,
        max_iter,
    )


def normalize_factor(coeffs: np.ndarray) -> np.ndarray:
    """Right-multiply by the constant unitary making ``c_0`` lower triangular
    with a positive diagonal."""
    q, r = np.linalg.qr(coeffs[0].conj().T)
    diag = np.diag(r)
    phase = np.ones_like(diag)
    nz = np.abs(diag) > 0
    phase[nz] = diag[nz] / np.abs(diag[nz])
    q = q * phase[None, :]
    out = coeffs @ q
    # c_0 q = r^* (phase-adjusted) is lower triangular by construction
    out[0] = np.tril(out[0])
    out[0][np.diag_indices(coeffs.shape[1])] = np.abs(np.diag(out[0]))
    return out


def factor_residual(S: SpectralDensityMatrix, F: SpectralFactor) -> float:
    """``max ||F F^* - S||_F / max ||S||_F`` over the grid of ``S``."""
    if F.dim != S.dim:
        raise DimensionMismatchError(f"factor dimension {F.dim} vs density dimension {S.dim}")
    vals = coeffs_to_grid(F.coeffs, S.grid)
    num = np.linalg.norm(vals @ _ctrans(vals) - S.values, axis=(1, 2)).max()
    den = np.linalg.norm(S.values, axis=(1, 2)).max()
    return float(num / den) if den > 0 else float(num)


def _is_truncated(coeffs: np.ndarray) -> bool:
    c0 = np.linalg.norm(coeffs[0])
    return bool(coeffs.shape[0] > 1 and np.linalg.norm(coeffs[-1]) > TRUNCATION_TOL * c0)


def _floor(values: np.ndarray, lam_max: float) -> np.ndarray:
    lam, vec = np.linalg.eigh(values)
    lam = np.maximum(lam, EIG_FLOOR * lam_max)
    return (vec * lam[:, None, :]) @ _ctrans(vec)


def _prepare(values: np.ndarray, oversample: int) -> np.ndarray:
    """Floor ill-conditioned samples and refine onto an oversampled grid.

    Near zeros of ``det S`` the interpolant may dip below the floor; those
    eigenvalues are floored again rather than abandoning the finer grid.
    """
    eig = np.linalg.eigvalsh(values)
    lam_max = float(eig.max())
    if np.any(eig[:, 0] * CONDITION_CAP < eig[:, -1]):
        values = _floor(values, lam_max)
    if oversample > 1:
        values = hermitian_part(trig_interpolate(values, oversample))
        if np.linalg.eigvalsh(values)[:, 0].min() < EIG_FLOOR * lam_max:
            values = _floor(values, lam_max)
    return values


def matrix_factorize(S: SpectralDensityMatrix, max_coeff: int = 64, tol: float = 1e-9,
                     max_iter: int = 200, oversample: int = 4,
                     method: str = "auto") -> SpectralFactor:
    """Outer spectral factor of a spectral density matrix.

    Parameters
    ----------
    S : SpectralDensityMatrix
        Density on a K-point grid.
    max_coeff : int
        Highest coefficient kept; must be below K/2.
    tol, max_iter : float, int
        Stopping tolerance (relative change and grid residual) and iteration cap.
    oversample : int
        Run the iteration on a trigonometric interpolation of ``S`` onto a
        grid ``oversample`` times finer. This suppresses aliasing of the
        slowly decaying inverse factor when ``det S`` nearly vanishes.
    method : {"auto", "wilson"}
        ``"auto"`` delegates one-dimensional densities to
        :func:`~spectral_granger.scalar_factor.scalar_factorize`.

    Returns
    -------
    SpectralFactor
        Coefficients ``c_0..c_M`` with ``c_0`` lower triangular with positive
        diagonal; ``residual`` is :func:`factor_residual` against ``S``.
    """
    k = S.size
    if not 0 <= max_coeff < k // 2:
        raise InputError(f"max_coeff={max_coeff} must lie in [0, {k // 2})")
    if method not in ("auto", "wilson"):
        raise InputError(f"unknown factorization method {method!r}")
    pw = check_paley_wiener(S)
    if not pw.satisfied:
        raise NotFactorizableError(
            f"spectral density fails the Paley-Wiener condition (mean log det {pw.log_det_mean})"
        )

    if S.dim == 1 and method == "auto":
        sf = scalar_factorize(S, max_coeff=max_coeff, oversample=oversample)
        coeffs = sf.coeffs[:, None, None]
        iterations = 0
    else:
        values = _prepare(S.values, oversample)
        psi, iterations, _ = wilson_iteration(values, tol=tol, max_iter=max_iter)
        coeffs = normalize_factor(grid_to_coeffs(psi, max_coeff))

    factor = SpectralFactor(coeffs, iterations=iterations, truncated=_is_truncated(coeffs))
    return SpectralFactor(factor.coeffs, factor_residual(S, factor), iterations, factor.truncated)


def factorize_with_config(S: SpectralDensityMatrix, cfg: FactorizationConfig | None = None,
                          max_coeff: int | None = None) -> SpectralFactor:
    cfg = FactorizationConfig() if cfg is None else cfg
    m = cfg.max_coeff if max_coeff is None else max_coeff
    return matrix_factorize(S, max_coeff=m, tol=cfg.tol, max_iter=cfg.max_iter,
                            oversample=cfg.oversample)

