"""Rank-1 vector error correction model via the two-step procedure.

Step 1 regresses the target on the other system variables (plus an
intercept); the residual defines the long-run equilibrium and the
cointegrating vector, normalized so the target's entry is 1. Step 2
regresses each variable's first difference on the lagged equilibrium
deviation and lag_order-1 lagged differences, equation by equation,
giving the loading vector and short-run matrices.

Conditional forecasting iterates the system one step at a time and,
after each step, overwrites any variable that has a user-fixed path
with its fixed value before computing the next step.
"""

from __future__ import annotations

import datetime as dt
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import CannotFixTarget, InsufficientData, InvalidHorizon, InvalidSystem, MissingExogPath
from ..timeseries import TimeSeriesFrame
from .arimax import complete_suffix
from .base import Forecast, FittedModel, ModelKind, ModelSpec
from .mlr import ols_qr

WEAK_CORRECTION_THRESHOLD = 0.05


@dataclass(frozen=True)
class FittedVECM(FittedModel):
    variables: tuple[str, ...]        # target first, then the rest
    alpha: np.ndarray                 # loading vector, one entry per variable
    beta: np.ndarray                  # cointegrating vector, target entry == 1
    beta_intercept: float             # long-run equilibrium constant
    gammas: tuple[np.ndarray, ...]    # short-run matrices, lag_order-1 of them
    intercepts: np.ndarray
    last_levels: np.ndarray           # last lag_order rows, forecast seed

    @property
    def lag_order(self) -> int:
        return len(self.gammas) + 1

    def equilibrium_deviation(self, levels: np.ndarray) -> float:
        """beta' y - c: the stationary spread the loading vector corrects."""
        return float(self.beta @ np.asarray(levels, dtype=float) - self.beta_intercept)

    def to_doc(self) -> dict:
        doc = self._base_doc()
        doc["parameters"] = {
            "variables": list(self.variables),
            "alpha": [float(v) for v in self.alpha],
            "beta": [float(v) for v in self.beta],
            "beta_intercept": float(self.beta_intercept),
            "gammas": [[[float(x) for x in row] for row in g] for g in self.gammas],
            "intercepts": [float(v) for v in self.intercepts],
            "state": {"last_levels": [[float(x) for x in row] for row in self.last_levels]},
        }
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "FittedVECM":
        p = doc["parameters"]
        return cls(
            spec=ModelSpec.from_doc(doc["spec"]),
            residual_sigma=doc["residual_sigma"],
            fit_range=(dt.date.fromisoformat(doc["fit_range"][0]),
                       dt.date.fromisoformat(doc["fit_range"][1])),
            variables=tuple(p["variables"]),
            alpha=np.array(p["alpha"], dtype=float),
            beta=np.array(p["beta"], dtype=float),
            beta_intercept=p["beta_intercept"],
            gammas=tuple(np.array(g, dtype=float) for g in p["gammas"]),
            intercepts=np.array(p["intercepts"], dtype=float),
            last_levels=np.array(p["state"]["last_levels"], dtype=float),
        )


def fit_vecm(frame: TimeSeriesFrame, spec: ModelSpec) -> FittedVECM:
    assert spec.kind is ModelKind.VECM
    spec.validate_against(frame)
    variables = (spec.target, *spec.exogenous)
    m = len(variables)
    if m < 2:
        raise InvalidSystem("VECM needs at least two system variables")
    k = spec.vecm.lag_order
    start = complete_suffix(frame, list(variables))
    Y = np.column_stack([frame.column(v)[start:] for v in variables])
    n = len(Y)
    if n <= (k + 2) * m + 5:
        raise InsufficientData(f"need n > (k+2)*m + 5 = {(k + 2) * m + 5}, have {n}")

    # step 1: long-run relation, target on the others
    X1 = np.column_stack([np.ones(n), Y[:, 1:]])
    coefs, _ = ols_qr(X1, Y[:, 0])
    beta_intercept = float(coefs[0])
    beta = np.r_[1.0, -coefs[1:]]
    ect = Y @ beta - beta_intercept

    # step 2: short-run dynamics, equation by equation
    dY = np.diff(Y, axis=0)
    rows = range(k - 1, len(dY))          # t indexes dY; regressors need k-1 lags
    lhs_rows = [t for t in rows]
    X2_cols = [np.ones(len(lhs_rows)), np.array([ect[t] for t in lhs_rows])]
    for lag in range(1, k):
        X2_cols.append(dY[[t - lag for t in lhs_rows]])
    # note ect enters lagged: dY[t] pairs with ect at the level index t
    X2 = np.column_stack(X2_cols)
    alpha = np.zeros(m)
    intercepts = np.zeros(m)
    gammas = [np.zeros((m, m)) for _ in range(k - 1)]
    ssr_total = 0.0
    for j in range(m):
        coef_j, ssr_j = ols_qr(X2, dY[lhs_rows, j])
        intercepts[j] = coef_j[0]
        alpha[j] = coef_j[1]
        for lag in range(1, k):
            gammas[lag - 1][j, :] = coef_j[2 + (lag - 1) * m : 2 + lag * m]
        ssr_total += ssr_j
    n_eff = len(lhs_rows)
    dof = max(n_eff - (2 + (k - 1) * m), 1)
    sigma = math.sqrt(ssr_total / (m * dof))

    if abs(alpha[0]) < WEAK_CORRECTION_THRESHOLD:
        warnings.warn(
            f"weak error correction: target loading {alpha[0]:.4f} is near zero",
            RuntimeWarning, stacklevel=2)

    return FittedVECM(
        spec=spec,
        residual_sigma=sigma,
        fit_range=(frame.index[start], frame.index[-1]),
        variables=variables,
        alpha=alpha,
        beta=beta,
        beta_intercept=beta_intercept,
        gammas=tuple(gammas),
        intercepts=intercepts,
        last_levels=Y[-k:].copy(),
    )


def vecm_system_forecast(model: FittedVECM, fixed_paths: dict[str, np.ndarray] | None,
                         horizon: int) -> np.ndarray:
    """Iterate the system ``horizon`` steps; returns (horizon, m) levels.

    Variables with a fixed path are overwritten after every step, so a
    fixed value at step s shapes the dynamics from step s+1 on.
    """
    if horizon < 1:
        raise InvalidHorizon(f"horizon must be >= 1, got {horizon}")
    fixed_paths = fixed_paths or {}
    fixed: dict[int, np.ndarray] = {}
    for name, path in fixed_paths.items():
        if name == model.spec.target:
            raise CannotFixTarget(f"cannot fix the target variable {name!r}")
        if name not in model.variables:
            continue  # not part of this system
        arr = np.asarray(path, dtype=float)
        if len(arr) != horizon or not np.all(np.isfinite(arr)):
            raise MissingExogPath(name, detail="fixed path must cover the whole horizon")
        fixed[model.variables.index(name)] = arr

    k = model.lag_order
    levels = [row.copy() for row in model.last_levels]  # last k rows
    out = np.zeros((horizon, len(model.variables)))
    for s in range(horizon):
        ect = model.beta @ levels[-1] - model.beta_intercept
        dy = model.intercepts + model.alpha * ect
        for lag in range(1, k):
            dy = dy + model.gammas[lag - 1] @ (levels[-lag] - levels[-lag - 1])
        nxt = levels[-1] + dy
        for j, path in fixed.items():
            nxt[j] = path[s]
        out[s] = nxt
        levels.append(nxt)
        levels.pop(0)
    return out


def forecast_vecm(model: FittedVECM, fixed_paths: dict[str, np.ndarray] | None,
                  horizon: int) -> Forecast:
    system = vecm_system_forecast(model, fixed_paths, horizon)
    return Forecast(ModelKind.VECM, horizon, system[:, 0], model.fit_range[1])
