"""Trained-model artifact layout and the registry the service reads from.

Forecasters and ARIMA models use the documented text formats; the selected
classifier is pickled together with its evaluation reports (trusted local
artifacts written by the CLI, not user uploads).
"""

from __future__ import annotations

import pickle
from pathlib import Path

from .arima import ArimaModel, load_arima, save_arima
from .classify import EvalReport, TrainedClassifier
from .exceptions import ModelNotTrained
from .lstm import LstmNetwork, load_lstm, save_lstm
from .weeks import Disease


def lstm_path(artifacts_dir, disease: Disease) -> Path:
    return Path(artifacts_dir) / f"lstm_{disease.value}.txt"


def arima_path(artifacts_dir, disease: Disease) -> Path:
    return Path(artifacts_dir) / f"arima_{disease.value}.txt"


def classifier_path(artifacts_dir, disease: Disease) -> Path:
    return Path(artifacts_dir) / f"classifier_{disease.value}.pkl"


def save_forecaster(artifacts_dir, disease: Disease, net: LstmNetwork) -> Path:
    path = lstm_path(artifacts_dir, disease)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_lstm(net, path)
    return path


def save_arima_model(artifacts_dir, disease: Disease, model: ArimaModel) -> Path:
    path = arima_path(artifacts_dir, disease)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_arima(model, path)
    return path


def save_classifier(
    artifacts_dir, disease: Disease, kind: str, clf: TrainedClassifier, reports: list[EvalReport]
) -> Path:
    path = classifier_path(artifacts_dir, disease)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        pickle.dump({"kind": kind, "classifier": clf, "reports": list(reports)}, fh)
    return path


def load_forecaster(artifacts_dir, disease: Disease) -> LstmNetwork:
    path = lstm_path(artifacts_dir, disease)
    if not path.exists():
        raise ModelNotTrained(f"no trained forecaster for {disease.value} at {path}")
    return load_lstm(path)


def load_arima_model(artifacts_dir, disease: Disease) -> ArimaModel:
    path = arima_path(artifacts_dir, disease)
    if not path.exists():
        raise ModelNotTrained(f"no trained arima model for {disease.value} at {path}")
    return load_arima(path)


def load_classifier(artifacts_dir, disease: Disease) -> tuple[str, TrainedClassifier, list[EvalReport]]:
    path = classifier_path(artifacts_dir, disease)
    if not path.exists():
        raise ModelNotTrained(f"no trained classifier for {disease.value} at {path}")
    with open(path, "rb") as fh:
        payload = pickle.load(fh)
    return payload["kind"], payload["classifier"], payload["reports"]


class ModelRegistry:
    """Loads each artifact once and serves it immutably afterwards."""

    def __init__(self, artifacts_dir):
        self.artifacts_dir = artifacts_dir
        self._forecasters: dict[Disease, LstmNetwork] = {}
        self._classifiers: dict[Disease, tuple[str, TrainedClassifier]] = {}

    def forecaster(self, disease: Disease) -> LstmNetwork:
        if disease not in self._forecasters:
            self._forecasters[disease] = load_forecaster(self.artifacts_dir, disease)
        return self._forecasters[disease]

    def classifier(self, disease: Disease) -> tuple[str, TrainedClassifier]:
        if disease not in self._classifiers:
            kind, clf, _ = load_classifier(self.artifacts_dir, disease)
            self._classifiers[disease] = (kind, clf)
        return self._classifiers[disease]
