# ttnc/utils/fitting.py
"""Least-squares fits emitted alongside benchmark data."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float


def linear_fit(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Fit ``y = slope * x + intercept`` and return the coefficient of determination.

    A constant series fitted exactly counts as ``r2 = 1``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0:
        raise ValueError("a linear fit needs at least two distinct x values")
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - residual / total if total > 0 else 1.0
    return FitResult(float(slope), float(intercept), float(r2))


def log2_fit(n: Sequence[float], y: Sequence[float]) -> FitResult:
    """Fit ``y = a * log2(n) + b``."""
    return linear_fit(np.log2(np.asarray(n, dtype=float)), y)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Fit ``log10 y = slope * log10 x + c``; the power-law exponent is the slope."""
    return linear_fit(np.log10(np.asarray(x, dtype=float)), np.log10(np.asarray(y, dtype=float)))
