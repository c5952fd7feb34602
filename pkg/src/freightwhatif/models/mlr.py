"""Multiple linear regression: OLS via QR with an explicit rank check."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import InsufficientData, SingularDesign
from ..timeseries import TimeSeriesFrame
from .base import Forecast, FittedModel, ModelKind, ModelSpec, check_exog_paths, complete_rows

_RANK_RTOL = 1e-10


def ols_qr(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares coefficients and SSR via Householder QR.

    Raises SingularDesign when any diagonal of R collapses relative to
    the largest, i.e. exact or near-exact collinearity.
    """
    Q, R = np.linalg.qr(X, mode="reduced")
    diag = np.abs(np.diag(R))
    if diag.min() <= _RANK_RTOL * max(diag.max(), 1.0):
        raise SingularDesign("design matrix is rank deficient")
    coefs = solve_triangular(R, Q.T @ y)
    resid = y - X @ coefs
    return coefs, float(resid @ resid)


@dataclass(frozen=True)
class FittedMLR(FittedModel):
    intercept: float
    coefficients: dict[str, float]

    def to_doc(self) -> dict:
        doc = self._base_doc()
        doc["parameters"] = {
            "intercept": self.intercept,
            "coefficients": {k: float(v) for k, v in self.coefficients.items()},
        }
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "FittedMLR":
        import datetime as dt

        p = doc["parameters"]
        return cls(
            spec=ModelSpec.from_doc(doc["spec"]),
            residual_sigma=doc["residual_sigma"],
            fit_range=(dt.date.fromisoformat(doc["fit_range"][0]),
                       dt.date.fromisoformat(doc["fit_range"][1])),
            intercept=p["intercept"],
            coefficients=dict(p["coefficients"]),
        )


def fit_mlr(frame: TimeSeriesFrame, spec: ModelSpec) -> FittedMLR:
    """Regress the target on intercept + contemporaneous exogenous values."""
    assert spec.kind is ModelKind.MLR
    spec.validate_against(frame)
    names = [spec.target, *spec.exogenous]
    mask = complete_rows(frame, names)
    n = int(mask.sum())
    k = len(spec.exogenous)
    if n < k + 2:
        raise InsufficientData(f"need >= {k + 2} complete rows, have {n}")
    y = frame.column(spec.target)[mask]
    X = np.column_stack([np.ones(n)] + [frame.column(v)[mask] for v in spec.exogenous])
    coefs, ssr = ols_qr(X, y)
    dof = max(n - (k + 1), 1)
    sigma = math.sqrt(ssr / dof)
    used = np.flatnonzero(mask)
    fit_range = (frame.index[used[0]], frame.index[used[-1]])
    return FittedMLR(
        spec=spec,
        residual_sigma=sigma,
        fit_range=fit_range,
        intercept=float(coefs[0]),
        coefficients={v: float(c) for v, c in zip(spec.exogenous, coefs[1:])},
    )


def forecast_mlr(model: FittedMLR, exog_paths: dict[str, np.ndarray], horizon: int) -> Forecast:
    paths = check_exog_paths(model.spec, exog_paths, horizon)
    values = np.full(horizon, model.intercept)
    for name in model.spec.exogenous:
        values = values + model.coefficients[name] * paths[name]
    return Forecast(ModelKind.MLR, horizon, values, model.fit_range[1])
