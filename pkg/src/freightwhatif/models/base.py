"""Shared model-layer types: specs, forecasts, impact summaries.

A fitted model is a frozen parameter record plus whatever in-sample
state its forecast recursion needs (residual tails, last levels,
normalization statistics). Every family serializes to a versioned JSON
document so the service can persist and reload trained models.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import InvalidHorizon, MissingExogPath
from ..timeseries import TimeSeriesFrame

MODEL_DOC_VERSION = 1


class ModelKind(enum.Enum):
    """The four supported families, in fixed ranking/tie-break order."""

    MLR = "mlr"
    ARIMAX = "arimax"
    VECM = "vecm"
    LSTM = "lstm"

    @property
    def order(self) -> int:
        return _KIND_ORDER[self]

    @classmethod
    def from_string(cls, text: str) -> "ModelKind":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown model kind {text!r}") from None


_KIND_ORDER = {ModelKind.MLR: 0, ModelKind.ARIMAX: 1, ModelKind.VECM: 2, ModelKind.LSTM: 3}


@dataclass(frozen=True)
class ArimaxParams:
    p: int = 1
    d: int = 1
    q: int = 1

    def __post_init__(self):
        if min(self.p, self.d, self.q) < 0:
            raise ValueError("ARIMAX orders must be nonnegative")


@dataclass(frozen=True)
class VecmParams:
    lag_order: int = 2

    def __post_init__(self):
        if self.lag_order < 1:
            raise ValueError("lag_order must be >= 1")


@dataclass(frozen=True)
class LstmParams:
    window: int = 4
    hidden_size: int = 8
    epochs: int = 200
    learning_rate: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.window < 1 or self.hidden_size < 1:
            raise ValueError("window and hidden_size must be >= 1")
        if self.epochs < 0 or self.learning_rate <= 0:
            raise ValueError("epochs must be >= 0 and learning_rate positive")


Hyperparams = ArimaxParams | VecmParams | LstmParams | None


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    target: str
    exogenous: tuple[str, ...] = ()
    params: Hyperparams = None

    def __post_init__(self):
        if self.target in self.exogenous:
            raise ValueError(f"target {self.target!r} cannot also be exogenous")
        if len(set(self.exogenous)) != len(self.exogenous):
            raise ValueError("exogenous names must be unique")
        expected = {ModelKind.ARIMAX: ArimaxParams, ModelKind.VECM: VecmParams,
                    ModelKind.LSTM: LstmParams}
        want = expected.get(self.kind)
        if self.params is not None and want is not None and not isinstance(self.params, want):
            raise ValueError(f"{self.kind.value} spec requires {want.__name__}")
        if self.kind is ModelKind.MLR and self.params is not None:
            raise ValueError("MLR takes no hyperparameters")

    @property
    def arimax(self) -> ArimaxParams:
        return self.params if isinstance(self.params, ArimaxParams) else ArimaxParams()

    @property
    def vecm(self) -> VecmParams:
        return self.params if isinstance(self.params, VecmParams) else VecmParams()

    @property
    def lstm(self) -> LstmParams:
        return self.params if isinstance(self.params, LstmParams) else LstmParams()

    def validate_against(self, frame: TimeSeriesFrame) -> None:
        for name in (self.target, *self.exogenous):
            if not frame.has_variable(name):
                from ..errors import MissingVariable

                raise MissingVariable(name)

    def to_doc(self) -> dict:
        doc: dict[str, Any] = {
            "kind": self.kind.value,
            "target": self.target,
            "exogenous": list(self.exogenous),
        }
        if self.kind is ModelKind.ARIMAX:
            hp = self.arimax
            doc["hyperparams"] = {"p": hp.p, "d": hp.d, "q": hp.q}
        elif self.kind is ModelKind.VECM:
            doc["hyperparams"] = {"lag_order": self.vecm.lag_order}
        elif self.kind is ModelKind.LSTM:
            hp = self.lstm
            doc["hyperparams"] = {
                "window": hp.window,
                "hidden_size": hp.hidden_size,
                "epochs": hp.epochs,
                "learning_rate": hp.learning_rate,
                "seed": hp.seed,
            }
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "ModelSpec":
        kind = ModelKind.from_string(doc["kind"])
        hp = doc.get("hyperparams") or {}
        params: Hyperparams = None
        if kind is ModelKind.ARIMAX:
            params = ArimaxParams(**hp) if hp else None
        elif kind is ModelKind.VECM:
            params = VecmParams(**hp) if hp else None
        elif kind is ModelKind.LSTM:
            params = LstmParams(**hp) if hp else None
        return cls(kind, doc["target"], tuple(doc.get("exogenous", ())), params)


@dataclass(frozen=True)
class Forecast:
    model_kind: ModelKind
    horizon: int
    values: np.ndarray
    origin: dt.date

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.horizon < 1:
            raise InvalidHorizon(f"horizon must be >= 1, got {self.horizon}")
        if len(self.values) != self.horizon:
            raise ValueError("values length must equal horizon")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("forecast values must be finite")

    def to_doc(self) -> dict:
        return {
            "model_kind": self.model_kind.value,
            "horizon": self.horizon,
            "values": [float(v) for v in self.values],
            "origin": self.origin.isoformat(),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Forecast":
        return cls(ModelKind.from_string(doc["model_kind"]), int(doc["horizon"]),
                   np.array(doc["values"], dtype=float), dt.date.fromisoformat(doc["origin"]))


@dataclass(frozen=True)
class ImpactSummary:
    """Two moments of one variable's contribution to the target.

    The UI renders these as Gaussian curves, so only (mean, std) travel.
    Families without scalar per-variable coefficients report
    ``available=False`` with both moments unset.
    """

    variable: str
    mean_impact: float | None
    std_impact: float | None
    available: bool

    def __post_init__(self):
        if not self.available and (self.mean_impact is not None or self.std_impact is not None):
            raise ValueError("unavailable impacts must leave moments unset")
        if self.available and (self.mean_impact is None or self.std_impact is None):
            raise ValueError("available impacts must set both moments")
        if self.available and self.std_impact < 0:
            raise ValueError("std_impact must be >= 0")

    def to_doc(self) -> dict:
        return {
            "variable": self.variable,
            "mean_impact": self.mean_impact,
            "std_impact": self.std_impact,
            "available": self.available,
        }


@dataclass(frozen=True)
class FittedModel:
    """Base record shared by the four families."""

    spec: ModelSpec
    residual_sigma: float
    fit_range: tuple[dt.date, dt.date]

    @property
    def kind(self) -> ModelKind:
        return self.spec.kind

    def _base_doc(self) -> dict:
        return {
            "version": MODEL_DOC_VERSION,
            "kind": self.kind.value,
            "spec": self.spec.to_doc(),
            "residual_sigma": float(self.residual_sigma),
            "fit_range": [self.fit_range[0].isoformat(), self.fit_range[1].isoformat()],
        }


def check_exog_paths(spec: ModelSpec, exog_paths: dict[str, np.ndarray], horizon: int) -> dict[str, np.ndarray]:
    """Validate per-variable future paths: present, complete, finite."""
    if horizon < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {horizon}")
    out: dict[str, np.ndarray] = {}
    for name in spec.exogenous:
        if name not in exog_paths:
            raise MissingExogPath(name)
        path = np.asarray(exog_paths[name], dtype=float)
        if len(path) != horizon:
            raise MissingExogPath(name, detail=f"length {len(path)} != horizon {horizon}")
        if not np.all(np.isfinite(path)):
            raise MissingExogPath(name, detail="path contains non-finite values")
        out[name] = path
    return out


def complete_rows(frame: TimeSeriesFrame, names: list[str]) -> np.ndarray:
    """Boolean mask of rows where every named column is observed."""
    mask = np.ones(len(frame), dtype=bool)
    for name in names:
        mask &= ~np.isnan(frame.column(name))
    return mask


def population_std(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=float)
    return float(math.sqrt(np.mean((values - values.mean()) ** 2)))
