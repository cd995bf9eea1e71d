"""Wiener-Granger causality from outer spectral factors.

Typical use::

    from spectral_granger import estimate_psd, causality_index, GroupSpec

    S = estimate_psd(series)
    ix = causality_index(S, GroupSpec(source_channels=(1,), target_channels=(0,)), L=1)
    ix.log_index
"""

from .causality import (
    CausalityIndex,
    CausalityReport,
    GroupSpec,
    causality_index,
    evaluate_grouping,
    lag_profile,
    significance_flag,
)
from .core import (
    AutocovarianceSequence,
    FrequencyGrid,
    MultichannelSeries,
    SpectralDensityMatrix,
    SpectralFactor,
    check_paley_wiener,
    coeffs_to_grid,
    grid_to_coeffs,
)
from .errors import (
    InputError,
    NonConvergenceError,
    NotFactorizableError,
    NumericalError,
    SpectralGrangerError,
)
from .estimation import (
    EstimatorConfig,
    VarModel,
    estimate_autocovariance,
    estimate_psd,
    var_autocovariance,
    var_psd,
)
from .matrix_factor import FactorizationConfig, factor_residual, matrix_factorize
from .oracle import finite_history_error, simulate_var
from .prediction import (
    PredictionError,
    grouped_prediction_error,
    joint_prediction_error,
    scalar_prediction_error,
)
from .scalar_factor import ScalarFactor, scalar_factorize

__version__ = "0.1.0"

__all__ = [
    "AutocovarianceSequence",
    "CausalityIndex",
    "CausalityReport",
    "EstimatorConfig",
    "FactorizationConfig",
    "FrequencyGrid",
    "GroupSpec",
    "InputError",
    "MultichannelSeries",
    "NonConvergenceError",
    "NotFactorizableError",
    "NumericalError",
    "PredictionError",
    "ScalarFactor",
    "SpectralDensityMatrix",
    "SpectralFactor",
    "SpectralGrangerError",
    "VarModel",
    "causality_index",
    "check_paley_wiener",
    "coeffs_to_grid",
    "estimate_autocovariance",
    "estimate_psd",
    "evaluate_grouping",
    "factor_residual",
    "finite_history_error",
    "grid_to_coeffs",
    "grouped_prediction_error",
    "joint_prediction_error",
    "lag_profile",
    "matrix_factorize",
    "scalar_factorize",
    "scalar_prediction_error",
    "significance_flag",
    "simulate_var",
    "var_autocovariance",
    "var_psd",
]
