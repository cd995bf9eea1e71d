"""VAR models with known causal structure, shared by tests and ``verify``."""

from __future__ import annotations

import numpy as np

from .estimation import VarModel

__all__ = ["FIXTURES", "get_fixture", "VAR1_LOG_INDEX_2_TO_1"]


def _ar1():
    return VarModel([[[0.5]]], [[1.0]])


def _var1():
    # channel 2 drives channel 1, no feedback
    return VarModel([[[0.5, 0.4], [0.0, 0.7]]], np.eye(2))


def _delayed():
    # x_n = 0.8 y_{n-2} + e1, y white
    return VarModel([np.zeros((2, 2)), [[0.0, 0.8], [0.0, 0.0]]], np.eye(2))


def _slow():
    # channel 1 marginal has an MA root near 0.89: finite histories converge slowly
    return VarModel([[[0.5, 0.1], [0.0, 0.95]]], np.eye(2))


FIXTURES = {
    "ar1": _ar1,
    "var1": _var1,
    "delayed": _delayed,
    "slow": _slow,
}

# ln of the geometric mean of 1.65 - 1.4 cos(theta), the numerator of channel
# 1's marginal spectrum for the var1 fixture (its denominator is a product of
# minimum-phase AR factors with geometric mean 1).
VAR1_LOG_INDEX_2_TO_1 = float(np.log((1.65 + np.sqrt(1.65**2 - 1.4**2)) / 2))


def get_fixture(name: str) -> VarModel:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}") from None
