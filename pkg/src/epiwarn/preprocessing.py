"""Normalization, differencing, windowing and chronological splitting.

All functions are pure; the estimator wrapper at the bottom gives the scaler
a fit/transform surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import BaseEstimator
from .exceptions import DegenerateRange, SeedMismatch, TooShort
from .validation import as_float_1d
from .weeks import WeeklySeries


@dataclass(frozen=True)
class ScalerParams:
    """Extrema captured at fit time; the affine map into [0, 1]."""

    min_value: float
    max_value: float

    def __post_init__(self):
        if not (math.isfinite(self.min_value) and math.isfinite(self.max_value)):
            raise DegenerateRange("scaler bounds must be finite")
        if self.max_value <= self.min_value:
            raise DegenerateRange(f"max ({self.max_value}) must exceed min ({self.min_value})")

    @property
    def span(self) -> float:
        return self.max_value - self.min_value


def minmax_fit(series_values) -> ScalerParams:
    """Capture the exact min and max of the input.

    Raises DegenerateRange when all values are equal (zero span), EmptyInput
    on an empty list.
    """
    arr = as_float_1d(series_values, name="series_values")
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        raise DegenerateRange(f"all {arr.size} values equal {lo}; cannot scale")
    return ScalerParams(lo, hi)


def minmax_apply(params: ScalerParams, values) -> list[float]:
    """(x - min) / (max - min), elementwise.

    Values outside the fitted range map outside [0, 1]; that is intentional,
    the scaler is fit on training data only.
    """
    arr = as_float_1d(values, name="values", allow_empty=True)
    return list((arr - params.min_value) / params.span)


def minmax_invert(params: ScalerParams, scaled) -> list[float]:
    """Inverse of minmax_apply: x = x' * (max - min) + min."""
    arr = as_float_1d(scaled, name="scaled", allow_empty=True)
    return list(arr * params.span + params.min_value)


def difference(values, d: int):
    """Apply first-differencing ``d`` times; output length = input length - d."""
    if d < 0:
        raise ValueError("d must be >= 0")
    arr = as_float_1d(values, name="values")
    if len(arr) <= d:
        raise TooShort(f"need more than d={d} values, got {len(arr)}")
    for _ in range(d):
        arr = np.diff(arr)
    return list(arr)


def integrate(diffs, seeds, d: int | None = None) -> list[float]:
    """Invert ``difference``: rebuild original-scale values after a seed prefix.

    ``seeds`` are the d consecutive original-scale values immediately
    preceding the segment covered by ``diffs`` (for forecasting, the last d
    observations of history). Returns the reconstructed continuation, same
    length as ``diffs``.
    """
    seeds = list(as_float_1d(seeds, name="seeds", allow_empty=True))
    if d is None:
        d = len(seeds)
    if len(seeds) != d:
        raise SeedMismatch(f"need exactly d={d} seed values, got {len(seeds)}")
    cur = list(as_float_1d(diffs, name="diffs", allow_empty=True))
    if d == 0:
        return cur
    # Difference pyramid of the seed block: row k holds the k-times-differenced
    # seeds; its last element seeds the integration at level k.
    rows = [seeds]
    for _ in range(d - 1):
        rows.append(list(np.diff(rows[-1])))
    for level in range(d - 1, -1, -1):
        base = rows[level][-1]
        out = []
        for v in cur:
            base = base + v
            out.append(base)
        cur = out
    return cur


def make_windows(values, window: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """Sliding input/target windows with stride 1.

    Returns (X, y) where X has shape (n - window, window) and y[i] is the
    value immediately following X[i].
    """
    arr = as_float_1d(values, name="values")
    if window < 1:
        raise ValueError("window must be >= 1")
    n = len(arr)
    if n < window + 1:
        raise TooShort(f"need at least window+1={window + 1} values, got {n}")
    X = np.lib.stride_tricks.sliding_window_view(arr, window)[:-1].copy()
    y = arr[window:].copy()
    return X, y


def split_chronological(series: WeeklySeries, test_fraction: float = 0.25) -> tuple[WeeklySeries, WeeklySeries]:
    """Earliest ceil((1-f)*n) points for training, the rest for testing.

    Temporal order is preserved; concatenating the two halves reproduces the
    input exactly.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValueError("test_fraction must be in (0, 1)")
    n = len(series)
    if n < 8:
        raise TooShort(f"need at least 8 points to split, got {n}")
    n_train = math.ceil((1.0 - test_fraction) * n)
    n_train = min(max(n_train, 1), n - 1)
    return series.slice(0, n_train), series.slice(n_train, n)


class MinMaxScaler(BaseEstimator):
    """Estimator wrapper around the min-max functions.

    fit captures extrema of the training values; transform/inverse_transform
    apply the affine map and its inverse.
    """

    def __init__(self):
        self.params_: ScalerParams | None = None

    def fit(self, values, y=None) -> "MinMaxScaler":
        self.params_ = minmax_fit(values)
        return self

    def transform(self, values) -> list[float]:
        self._check_fitted("params_")
        return minmax_apply(self.params_, values)

    def inverse_transform(self, scaled) -> list[float]:
        self._check_fitted("params_")
        return minmax_invert(self.params_, scaled)

    def fit_transform(self, values, y=None) -> list[float]:
        return self.fit(values).transform(values)
