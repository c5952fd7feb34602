"""The four forecasting families plus kind-based dispatch helpers."""

from __future__ import annotations

import json

import numpy as np

from ..timeseries import TimeSeriesFrame
from .arimax import FittedARIMAX, fit_arimax, forecast_arimax
from .base import (
    ArimaxParams,
    Forecast,
    FittedModel,
    ImpactSummary,
    LstmParams,
    ModelKind,
    ModelSpec,
    VecmParams,
)
from .impacts import coefficient_impacts
from .lstm import FittedLSTM, fit_lstm, forecast_lstm, lstm_gradient_check
from .mlr import FittedMLR, fit_mlr, forecast_mlr
from .vecm import FittedVECM, fit_vecm, forecast_vecm, vecm_system_forecast

__all__ = [
    "ArimaxParams", "Forecast", "FittedARIMAX", "FittedLSTM", "FittedMLR",
    "FittedModel", "FittedVECM", "ImpactSummary", "LstmParams", "ModelKind",
    "ModelSpec", "VecmParams", "coefficient_impacts", "fit_arimax", "fit_lstm",
    "fit_mlr", "fit_model", "fit_vecm", "forecast_arimax", "forecast_lstm",
    "forecast_mlr", "forecast_model", "forecast_vecm", "load_model_json",
    "lstm_gradient_check", "model_to_json", "vecm_system_forecast",
]

_FITTERS = {
    ModelKind.MLR: fit_mlr,
    ModelKind.ARIMAX: fit_arimax,
    ModelKind.VECM: fit_vecm,
    ModelKind.LSTM: fit_lstm,
}

_DOC_CLASSES = {
    ModelKind.MLR: FittedMLR,
    ModelKind.ARIMAX: FittedARIMAX,
    ModelKind.VECM: FittedVECM,
    ModelKind.LSTM: FittedLSTM,
}


def fit_model(frame: TimeSeriesFrame, spec: ModelSpec) -> FittedModel:
    return _FITTERS[spec.kind](frame, spec)


def forecast_model(model: FittedModel, exog_paths: dict[str, np.ndarray],
                   horizon: int) -> Forecast:
    """Forecast with per-variable future paths, whatever the family.

    For regression-style families the paths are regressor values; for
    VECM they are fixed system variables; for LSTM they are the inputs
    fed back alongside the model's own predictions.
    """
    if isinstance(model, FittedMLR):
        return forecast_mlr(model, exog_paths, horizon)
    if isinstance(model, FittedARIMAX):
        return forecast_arimax(model, exog_paths, horizon)
    if isinstance(model, FittedVECM):
        return forecast_vecm(model, exog_paths, horizon)
    if isinstance(model, FittedLSTM):
        return forecast_lstm(model, exog_paths, horizon)
    raise TypeError(f"unknown model type {type(model).__name__}")


def model_to_json(model: FittedModel) -> str:
    return json.dumps(model.to_doc())


def load_model_doc(doc: dict) -> FittedModel:
    version = doc.get("version")
    if version != 1:
        raise ValueError(f"unsupported model document version {version!r}")
    kind = ModelKind.from_string(doc["kind"])
    return _DOC_CLASSES[kind].from_doc(doc)


def load_model_json(text: str) -> FittedModel:
    return load_model_doc(json.loads(text))
