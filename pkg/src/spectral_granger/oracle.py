"""Independent checks: finite-history least-squares prediction and VAR simulation.

``finite_history_error`` computes the exact minimum of the prediction problem
over a fixed history ``N`` by solving the normal equations built from
autocovariances. It shares no code with the spectral-factor route, so the two
can validate each other.
"""

from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np
import scipy.linalg

from .core import AutocovarianceSequence, MultichannelSeries
from .errors import InputError
from .estimation import VarModel

__all__ = [
    "RegularizedGramWarning",
    "finite_history_error",
    "history_gram",
    "simulate_var",
]

GRAM_REG = 1e-10


class RegularizedGramWarning(RuntimeWarning):
    """The Gram matrix was singular and a ridge term was added before solving."""


def _indices(channels: Sequence[int], dim: int, what: str) -> list[int]:
    idx = [int(i) for i in channels]
    if not idx:
        raise InputError(f"{what} channel set is empty")
    if min(idx) < 0 or max(idx) >= dim:
        raise InputError(f"{what} channels {idx} out of range for dimension {dim}")
    return idx


def history_gram(acov: AutocovarianceSequence, channels: Sequence[int], N: int) -> np.ndarray:
    """Gram matrix of the selected channels at times ``0, -1, ..., -N``."""
    return acov.block_toeplitz(N + 1, _indices(channels, acov.dim, "predictor"))


def finite_history_error(acov: AutocovarianceSequence, predictor_channels: Sequence[int],
                         target_channels: Sequence[int], L: int, N: int) -> float:
    """Minimal error of predicting the targets at time ``L`` from the
    predictors at times ``0, -1, ..., -N``.

    Returns ``sqrt(sum_j (c_0 - b^* G^{-1} b)_jj)`` over target channels ``j``,
    where ``G`` is the history Gram matrix and ``b`` the cross-covariance of
    the history with the targets at time ``L``.
    """
    pred = _indices(predictor_channels, acov.dim, "predictor")
    tgt = _indices(target_channels, acov.dim, "target")
    if L < 1 or N < 0:
        raise InputError("need L >= 1 and N >= 0")
    if acov.max_lag < N + L:
        raise InputError(f"autocovariances up to lag {N + L} required, have {acov.max_lag}")

    gram = history_gram(acov, pred, N)
    # E[x_{-j} x_L^*] = c_{L+j}^*
    cross = np.concatenate([acov.lag(L + j).conj().T[np.ix_(pred, tgt)] for j in range(N + 1)])
    gram = 0.5 * (gram + gram.conj().T)
    try:
        sol = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), cross)
    except np.linalg.LinAlgError:
        lam = GRAM_REG * np.trace(gram).real / gram.shape[0]
        warnings.warn(
            f"singular Gram matrix, solving with ridge {lam:.3e}", RegularizedGramWarning, stacklevel=2
        )
        sol = scipy.linalg.solve(gram + lam * np.eye(gram.shape[0]), cross, assume_a="her")
    err = acov.lag(0)[np.ix_(tgt, tgt)] - cross.conj().T @ sol
    return float(np.sqrt(max(np.trace(err).real, 0.0)))


def simulate_var(model: VarModel, T: int, seed: int, channel_names: Sequence[str] = ()) -> MultichannelSeries:
    """Simulate ``T`` samples of a stable VAR with Gaussian innovations.

    Innovations come from numpy's PCG64 generator seeded with ``seed``; the
    first ``10 * order + 100`` samples are discarded as burn-in.
    """
    if T < 2:
        raise InputError("T must be at least 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    d, r = model.dim, model.order
    burn = 10 * r + 100
    total = T + burn
    noise = rng.standard_normal((total, d)) @ np.linalg.cholesky(model.noise_cov).T
    x = np.zeros((total + r, d))
    a = [np.asarray(m) for m in model.coeff_matrices]
    for t in range(total):
        acc = noise[t].copy()
        for k in range(r):
            acc += a[k] @ x[t + r - 1 - k]
        x[t + r] = acc
    return MultichannelSeries(x[r + burn:].T, tuple(channel_names))
