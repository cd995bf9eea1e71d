"""Wiener-Granger causality indices between channel groups.

For a target group X and a source group Y the restricted error ``e_X`` uses the
target's own past (the factor of the target-marginal spectrum), the full error
``e_XY`` uses the past of both groups (grouped rows of the factor of the joint
spectrum). The reported statistic is ``log_index = ln(e_X^2 / e_XY^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import SpectralDensityMatrix, SpectralFactor
from .errors import InputError, NonConvergenceError, NotFactorizableError
from .matrix_factor import FactorizationConfig, factorize_with_config
from .prediction import grouped_prediction_error, joint_prediction_error

__all__ = [
    "GroupSpec",
    "CausalityIndex",
    "GroupingResult",
    "CausalityReport",
    "causality_index",
    "lag_profile",
    "significance_flag",
    "evaluate_grouping",
    "DEFAULT_THRESHOLD",
]

DEFAULT_THRESHOLD = 0.01


@dataclass(frozen=True)
class GroupSpec:
    """Source group Y and target group X as 0-based channel indices."""

    source_channels: tuple[int, ...]
    target_channels: tuple[int, ...]

    def __post_init__(self):
        src = tuple(int(i) for i in self.source_channels)
        tgt = tuple(int(i) for i in self.target_channels)
        if not src or not tgt:
            raise InputError("source and target groups must be nonempty")
        if len(set(src)) != len(src) or len(set(tgt)) != len(tgt):
            raise InputError("duplicate channel inside a group")
        if set(src) & set(tgt):
            raise InputError(f"source {src} and target {tgt} groups overlap")
        if min(src + tgt) < 0:
            raise InputError("channel indices must be nonnegative")
        object.__setattr__(self, "source_channels", src)
        object.__setattr__(self, "target_channels", tgt)

    def validate(self, dim: int) -> None:
        if max(self.source_channels + self.target_channels) >= dim:
            raise InputError(f"group {self} out of range for {dim} channels")

    @property
    def joint_channels(self) -> tuple[int, ...]:
        return self.target_channels + self.source_channels


@dataclass(frozen=True)
class CausalityIndex:
    lag: int
    e_restricted: float
    e_full: float

    @property
    def ratio(self) -> float:
        return self.e_full / self.e_restricted if self.e_restricted > 0 else float("nan")

    @property
    def log_index(self) -> float:
        if self.e_full <= 0 or self.e_restricted <= 0:
            return float("nan")
        return float(2.0 * (np.log(self.e_restricted) - np.log(self.e_full)))

    def to_dict(self, threshold: float | None = None) -> dict:
        out = {
            "lag": self.lag,
            "e_restricted": self.e_restricted,
            "e_full": self.e_full,
            "e_restricted_squared": self.e_restricted ** 2,
            "e_full_squared": self.e_full ** 2,
            "ratio": self.ratio,
            "log_index": self.log_index,
        }
        if threshold is not None:
            out["significant"] = significance_flag(self, threshold)
        return out


def significance_flag(index: CausalityIndex, threshold: float = DEFAULT_THRESHOLD) -> bool:
    """True iff ``log_index > threshold`` (strict)."""
    if not threshold > 0:
        raise InputError("threshold must be positive")
    return bool(index.log_index > threshold)


@dataclass(frozen=True)
class GroupingResult:
    spec: GroupSpec
    indices: tuple[CausalityIndex, ...]
    joint_factor: SpectralFactor
    marginal_factor: SpectralFactor
    name: str = ""


def _factorize(S: SpectralDensityMatrix, cfg: FactorizationConfig, max_coeff: int,
               which: str) -> SpectralFactor:
    try:
        return factorize_with_config(S, cfg, max_coeff)
    except NonConvergenceError as exc:
        raise NonConvergenceError(f"{which} spectrum: {exc}", exc.residual, exc.iterations) from exc
    except NotFactorizableError as exc:
        raise NotFactorizableError(f"{which} spectrum: {exc}") from exc


def evaluate_grouping(S_joint: SpectralDensityMatrix, spec: GroupSpec, lags: Sequence[int],
                      cfg: FactorizationConfig | None = None, name: str = "") -> GroupingResult:
    """Factorize the joint and target-marginal spectra once and evaluate all lags."""
    cfg = FactorizationConfig() if cfg is None else cfg
    lags = [int(L) for L in lags]
    if not lags:
        raise InputError("at least one lag is required")
    if any(L < 1 for L in lags):
        raise InputError(f"lags must be positive, got {lags}")
    if lags != sorted(lags):
        raise InputError(f"lags must be sorted ascending, got {lags}")
    spec.validate(S_joint.dim)
    max_coeff = max(cfg.max_coeff, lags[-1])
    p = len(spec.target_channels)

    joint = _factorize(S_joint.submatrix(spec.joint_channels), cfg, max_coeff, "joint")
    marginal = _factorize(S_joint.submatrix(spec.target_channels), cfg, max_coeff, "target-marginal")
    indices = tuple(
        CausalityIndex(
            lag=L,
            e_restricted=joint_prediction_error(marginal, L).value,
            e_full=grouped_prediction_error(joint, range(p), L).value,
        )
        for L in lags
    )
    return GroupingResult(spec, indices, joint, marginal, name)


def lag_profile(S_joint: SpectralDensityMatrix, spec: GroupSpec, lags: Sequence[int],
                cfg: FactorizationConfig | None = None) -> list[CausalityIndex]:
    return list(evaluate_grouping(S_joint, spec, lags, cfg).indices)


def causality_index(S_joint: SpectralDensityMatrix, spec: GroupSpec, L: int,
                    cfg: FactorizationConfig | None = None) -> CausalityIndex:
    """Causality index of ``spec.source -> spec.target`` at lag ``L``."""
    return lag_profile(S_joint, spec, [L], cfg)[0]


@dataclass
class CausalityReport:
    """Everything a consumer needs to judge one analysis run."""

    channel_names: tuple[str, ...]
    results: list[GroupingResult]
    threshold: float = DEFAULT_THRESHOLD
    grid_size: int = 0
    n_samples: int = 0
    estimator: dict = field(default_factory=dict)
    factorization: dict = field(default_factory=dict)
    paley_wiener: dict = field(default_factory=dict)

    SCHEMA_VERSION = "1.0"

    def _names(self, idx: Sequence[int]) -> list[str]:
        return [self.channel_names[i] for i in idx]

    def to_dict(self) -> dict:
        groupings = []
        for res in self.results:
            groupings.append({
                "name": res.name,
                "target": self._names(res.spec.target_channels),
                "source": self._names(res.spec.source_channels),
                "joint_residual": res.joint_factor.residual,
                "marginal_residual": res.marginal_factor.residual,
                "joint_truncated": res.joint_factor.truncated,
                "marginal_truncated": res.marginal_factor.truncated,
                "joint_iterations": res.joint_factor.iterations,
                "marginal_iterations": res.marginal_factor.iterations,
                "indices": [ix.to_dict(self.threshold) for ix in res.indices],
            })
        return {
            "schema_version": self.SCHEMA_VERSION,
            "channel_names": list(self.channel_names),
            "n_samples": self.n_samples,
            "grid_size": self.grid_size,
            "threshold": self.threshold,
            "estimator": dict(self.estimator),
            "factorization": dict(self.factorization),
            "paley_wiener": dict(self.paley_wiener),
            "groupings": groupings,
        }
