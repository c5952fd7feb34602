"""Walk-forward backtesting, error metrics, and model ranking.

Backtests feed the models TRUE future exogenous values, never forecasts
of them: the comparison view ranks model error, not scenario error. The
training window expands rather than rolls because weekly market samples
are small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyInput, ShapeError
from .models import ModelKind, ModelSpec, fit_model, forecast_model
from .timeseries import TimeSeriesFrame


class ErrorMetrics(NamedTuple):
    rmse: float
    mae: float
    mape: float          # percent; NaN when every actual is zero
    mape_skipped: int    # points excluded because actual == 0


def metrics(actual: np.ndarray, predicted: np.ndarray) -> ErrorMetrics:
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape or actual.ndim != 1:
        raise ShapeError(f"shape mismatch: {actual.shape} vs {predicted.shape}")
    if len(actual) == 0:
        raise ShapeError("need at least one point")
    err = predicted - actual
    rmse = float(np.sqrt(np.mean(err**2)))
    mae = float(np.mean(np.abs(err)))
    nonzero = actual != 0.0
    skipped = int((~nonzero).sum())
    if nonzero.any():
        mape = float(100.0 * np.mean(np.abs(err[nonzero] / actual[nonzero])))
    else:
        mape = math.nan
    return ErrorMetrics(rmse, mae, mape, skipped)


@dataclass(frozen=True)
class ModelScorecard:
    model_kind: ModelKind
    rmse: float
    mae: float
    mape: float
    n_folds: int
    per_fold_errors: tuple[float, ...]  # per-fold rmse

    def __post_init__(self):
        if self.rmse < 0 or self.mae < 0:
            raise ValueError("error metrics must be nonnegative")
        if self.n_folds != len(self.per_fold_errors):
            raise ValueError("n_folds must match per_fold_errors length")

    def metric(self, name: str) -> float:
        if name not in ("rmse", "mae", "mape"):
            raise ValueError(f"unknown metric {name!r}")
        return getattr(self, name)

    def to_doc(self) -> dict:
        return {
            "model_kind": self.model_kind.value,
            "rmse": self.rmse,
            "mae": self.mae,
            "mape": None if math.isnan(self.mape) else self.mape,
            "n_folds": self.n_folds,
            "per_fold_errors": list(self.per_fold_errors),
        }


def walk_forward_backtest(spec: ModelSpec, frame: TimeSeriesFrame, n_folds: int,
                          horizon: int = 1) -> ModelScorecard:
    """Expanding-window evaluation over the last folds of the frame.

    Fold j fits on the first (n - n_folds - horizon + 1 + j) rows and
    forecasts ``horizon`` steps with the true exogenous values from the
    held-out rows. Deterministic given the seeds inside ``spec``.
    """
    if n_folds < 2:
        raise ValueError("n_folds must be >= 2")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    n = len(frame)
    actual_all: list[float] = []
    predicted_all: list[float] = []
    per_fold: list[float] = []
    for j in range(n_folds):
        train_n = n - n_folds - horizon + 1 + j
        if train_n < 1:
            raise ValueError("frame too short for the requested folds and horizon")
        train = frame.head(train_n)
        model = fit_model(train, spec)
        future_rows = slice(train_n, train_n + horizon)
        exog_paths = {v: frame.column(v)[future_rows].copy() for v in spec.exogenous}
        forecast = forecast_model(model, exog_paths, horizon)
        actual = frame.column(spec.target)[future_rows]
        err = forecast.values - actual
        actual_all.extend(actual)
        predicted_all.extend(forecast.values)
        per_fold.append(float(np.sqrt(np.mean(err**2))))
    pooled = metrics(np.array(actual_all), np.array(predicted_all))
    return ModelScorecard(
        model_kind=spec.kind,
        rmse=pooled.rmse,
        mae=pooled.mae,
        mape=pooled.mape,
        n_folds=n_folds,
        per_fold_errors=tuple(per_fold),
    )


def rank_models(cards: list[ModelScorecard], metric: str = "rmse") -> list[ModelScorecard]:
    """Ascending by metric; ties break on the fixed family order."""
    if not cards:
        raise EmptyInput("no scorecards to rank")
    folds = {c.n_folds for c in cards}
    if len(folds) != 1:
        raise ValueError(f"scorecards disagree on n_folds: {sorted(folds)}")

    def key(c: ModelScorecard):
        value = c.metric(metric)
        # an undefined mape (all-zero actuals) ranks last, not randomly
        return (math.inf if math.isnan(value) else value, c.model_kind.order)

    return sorted(cards, key=key)
