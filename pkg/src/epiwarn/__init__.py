"""Epidemic early-warning toolkit.

Weekly incidence forecasting (ARIMA and a from-scratch stacked LSTM), outbreak
probability from non-clinical weekly features, and the service/CLI plumbing to
run it as a small surveillance system.
"""

from .arima import ArimaForecaster, ArimaModel, ArimaOrder, arima_auto_search, arima_fit, arima_forecast
from .classify import (
    ClassifierKind,
    FeatureRow,
    LabeledDataset,
    build_dataset,
    evaluate,
    label_outbreaks,
    predict_proba,
    select_model,
    train_classifier,
)
from .lstm import LstmForecaster, LstmNetwork, NetworkConfig, TrainConfig, forecast_recursive
from .metrics import MetricsReport, compute_metrics
from .preprocessing import (
    MinMaxScaler,
    ScalerParams,
    difference,
    integrate,
    make_windows,
    minmax_apply,
    minmax_fit,
    minmax_invert,
    split_chronological,
)
from .weeks import Disease, WeekKey, WeeklySeries

__version__ = "0.1.0"

__all__ = [
    "ArimaForecaster",
    "ArimaModel",
    "ArimaOrder",
    "ClassifierKind",
    "Disease",
    "FeatureRow",
    "LabeledDataset",
    "LstmForecaster",
    "LstmNetwork",
    "MetricsReport",
    "MinMaxScaler",
    "NetworkConfig",
    "ScalerParams",
    "TrainConfig",
    "WeekKey",
    "WeeklySeries",
    "arima_auto_search",
    "arima_fit",
    "arima_forecast",
    "build_dataset",
    "compute_metrics",
    "difference",
    "evaluate",
    "forecast_recursive",
    "integrate",
    "label_outbreaks",
    "make_windows",
    "minmax_apply",
    "minmax_fit",
    "minmax_invert",
    "predict_proba",
    "select_model",
    "split_chronological",
    "train_classifier",
]
