"""Cross-validation of spectral prediction errors against finite-history least squares."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import FrequencyGrid
from .estimation import var_autocovariance, var_psd
from .fixtures import FIXTURES, get_fixture
from .matrix_factor import matrix_factorize
from .oracle import finite_history_error
from .prediction import grouped_prediction_error, joint_prediction_error

__all__ = ["VerificationRow", "run_verification", "format_table"]


@dataclass(frozen=True)
class VerificationRow:
    fixture: str
    quantity: str
    lag: int
    spectral: float
    oracle: float
    tolerance: float

    @property
    def rel_error(self) -> float:
        return abs(self.spectral - self.oracle) / abs(self.oracle)

    @property
    def passed(self) -> bool:
        return self.rel_error <= self.tolerance


def _fixture_rows(name: str, lags: Sequence[int], history: int, tolerance: float,
                  grid: FrequencyGrid) -> Iterable[VerificationRow]:
    model = get_fixture(name)
    d = model.dim
    S = var_psd(model, grid)
    acov = var_autocovariance(model, history + max(lags))
    joint = matrix_factorize(S, max_coeff=max(64, max(lags)))
    everything = list(range(d))
    for L in lags:
        yield VerificationRow(name, "joint", L, joint_prediction_error(joint, L).value,
                              finite_history_error(acov, everything, everything, L, history), tolerance)
    if d == 1:
        return
    for j in range(d):
        marginal = matrix_factorize(S.submatrix([j]), max_coeff=max(64, max(lags)))
        for L in lags:
            yield VerificationRow(name, f"grouped[{j + 1}]", L,
                                  grouped_prediction_error(joint, [j], L).value,
                                  finite_history_error(acov, everything, [j], L, history), tolerance)
            yield VerificationRow(name, f"restricted[{j + 1}]", L,
                                  joint_prediction_error(marginal, L).value,
                                  finite_history_error(acov, [j], [j], L, history), tolerance)


def run_verification(fixtures: Sequence[str] | None = None, tolerance: float = 1e-3,
                     lags: Sequence[int] = (1, 2, 4), history: int = 64,
                     grid: FrequencyGrid | None = None) -> list[VerificationRow]:
    """Compare spectral and finite-history errors on the named VAR fixtures.

    Every fixture contributes joint, grouped (one target, all predictors) and
    restricted (target marginal only) errors at each lag.
    """
    grid = FrequencyGrid() if grid is None else grid
    names = list(FIXTURES) if not fixtures else list(fixtures)
    rows: list[VerificationRow] = []
    for name in names:
        rows.extend(_fixture_rows(name, lags, history, tolerance, grid))
    return rows


def format_table(rows: Sequence[VerificationRow]) -> str:
    lines = [f"{'fixture':<9} {'quantity':<14} {'lag':>3} {'spectral':>20} {'oracle':>20} "
             f"{'rel_error':>10}  result"]
    for r in rows:
        lines.append(
            f"{r.fixture:<9} {r.quantity:<14} {r.lag:>3} {r.spectral:>20.15f} {r.oracle:>20.15f} "
            f"{r.rel_error:>10.2e}  {'PASS' if r.passed else 'FAIL'}"
        )
    failed = sum(not r.passed for r in rows)
    lines.append(f"{len(rows) - failed}/{len(rows)} checks passed")
    return "\n".join(lines)
