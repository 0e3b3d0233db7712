"""Forecast-quality metrics: RMSE, MAE, MAD, MASE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import MaseUndefined
from .validation import as_float_1d, check_same_length


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    mae: float
    mad: float
    mase: float


def compute_metrics(actual, predicted, train_reference) -> MetricsReport:
    """Error metrics of ``predicted`` against ``actual``.

    MAD is the median absolute deviation of the errors; MASE scales MAE by the
    mean absolute one-step naive error on ``train_reference`` (forecasting
    each training value as the previous one). Raises MaseUndefined when that
    denominator is zero or the reference has fewer than two values.
    """
    a = as_float_1d(actual, name="actual")
    p = as_float_1d(predicted, name="predicted")
    check_same_length(a, p)
    ref = as_float_1d(train_reference, name="train_reference")

    errors = p - a
    rmse = float(np.sqrt(np.mean(errors**2)))
    mae = float(np.mean(np.abs(errors)))
    mad = float(np.median(np.abs(errors - np.median(errors))))

    if len(ref) < 2:
        raise MaseUndefined("train_reference needs at least 2 values")
    naive = float(np.mean(np.abs(np.diff(ref))))
    if naive == 0.0:
        raise MaseUndefined("naive one-step error on train_reference is zero")
    mase = mae / naive
    return MetricsReport(rmse=rmse, mae=mae, mad=mad, mase=mase)
