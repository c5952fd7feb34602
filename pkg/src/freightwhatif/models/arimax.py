"""ARIMAX(p,d,q): conditional-sum-of-squares estimation.

Fitting differences the target (and exogenous regressors) d times,
regresses the exogenous terms out by OLS, then minimizes the conditional
sum of squares of the remaining ARMA part over (intercept, phi, theta)
with a Nelder-Mead simplex. Innovations before the conditioning point
are fixed at zero. Parameter vectors whose AR or MA polynomial has a
root on or inside the unit circle are rejected during the search, which
keeps the fit stationary and invertible.

Forecasting runs the standard ARMA recursion with future innovations at
zero and integrates d times from the last observed levels.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..errors import FitDidNotConverge, InsufficientData, MissingData
from ..timeseries import TimeSeriesFrame
from .base import Forecast, FittedModel, ModelKind, ModelSpec, check_exog_paths
from .mlr import ols_qr

_UNSTABLE_PENALTY = 1e12


def complete_suffix(frame: TimeSeriesFrame, names: list[str]) -> int:
    """First row index from which every named column is fully observed.

    Dynamic models need a contiguous sample; leading gaps are dropped,
    interior gaps are not tolerated.
    """
    bad = np.zeros(len(frame), dtype=bool)
    for name in names:
        bad |= np.isnan(frame.column(name))
    nz = np.flatnonzero(bad)
    return 0 if nz.size == 0 else int(nz[-1]) + 1


def _difference(series: np.ndarray, d: int) -> np.ndarray:
    out = np.asarray(series, dtype=float)
    for _ in range(d):
        out = np.diff(out)
    return out


def _poly_unstable(coeffs: np.ndarray, sign: float) -> bool:
    """True if 1 + sign*(c1 z + ... + ck z^k) has a root with |z| <= 1."""
    if len(coeffs) == 0:
        return False
    poly = np.r_[sign * coeffs[::-1], 1.0]
    roots = np.roots(poly)
    return bool(np.any(np.abs(roots) <= 1.0))


def css_residuals(u: np.ndarray, intercept: float, phi: np.ndarray,
                  theta: np.ndarray) -> np.ndarray:
    """Innovation sequence conditional on the first p observations.

    eps[t] = 0 for t < p; later entries follow the ARMA recursion.
    """
    n = len(u)
    p, q = len(phi), len(theta)
    eps = np.zeros(n)
    if q == 0:
        e = u[p:] - intercept
        for j in range(1, p + 1):
            e = e - phi[j - 1] * u[p - j : n - j]
        eps[p:] = e
        return eps
    for t in range(p, n):
        e = u[t] - intercept
        for j in range(1, p + 1):
            e -= phi[j - 1] * u[t - j]
        for k in range(1, q + 1):
            if t - k >= 0:
                e -= theta[k - 1] * eps[t - k]
        eps[t] = e
    return eps


def _css_value(params: np.ndarray, u: np.ndarray, p: int, q: int) -> float:
    intercept = params[0]
    phi = params[1 : 1 + p]
    theta = params[1 + p : 1 + p + q]
    if _poly_unstable(phi, -1.0) or _poly_unstable(theta, 1.0):
        return _UNSTABLE_PENALTY
    eps = css_residuals(u, intercept, phi, theta)
    return float(eps[p:] @ eps[p:])


@dataclass(frozen=True)
class FittedARIMAX(FittedModel):
    ar: np.ndarray
    ma: np.ndarray
    exog_coefficients: dict[str, float]
    intercept: float
    d: int
    # forecast seeding state, taken from the fitted sample tail
    target_tails: np.ndarray          # [y_n, dy_n, ..., d^{d-1}y_n]
    u_tail: np.ndarray                # last p regression-adjusted values
    eps_tail: np.ndarray              # last q fitted innovations
    exog_tails: dict[str, np.ndarray]  # last d levels per exogenous variable

    def to_doc(self) -> dict:
        doc = self._base_doc()
        doc["parameters"] = {
            "ar": [float(v) for v in self.ar],
            "ma": [float(v) for v in self.ma],
            "exog_coefficients": {k: float(v) for k, v in self.exog_coefficients.items()},
            "intercept": float(self.intercept),
            "d": self.d,
            "state": {
                "target_tails": [float(v) for v in self.target_tails],
                "u_tail": [float(v) for v in self.u_tail],
                "eps_tail": [float(v) for v in self.eps_tail],
                "exog_tails": {k: [float(x) for x in v] for k, v in self.exog_tails.items()},
            },
        }
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "FittedARIMAX":
        p = doc["parameters"]
        st = p["state"]
        return cls(
            spec=ModelSpec.from_doc(doc["spec"]),
            residual_sigma=doc["residual_sigma"],
            fit_range=(dt.date.fromisoformat(doc["fit_range"][0]),
                       dt.date.fromisoformat(doc["fit_range"][1])),
            ar=np.array(p["ar"], dtype=float),
            ma=np.array(p["ma"], dtype=float),
            exog_coefficients=dict(p["exog_coefficients"]),
            intercept=p["intercept"],
            d=p["d"],
            target_tails=np.array(st["target_tails"], dtype=float),
            u_tail=np.array(st["u_tail"], dtype=float),
            eps_tail=np.array(st["eps_tail"], dtype=float),
            exog_tails={k: np.array(v, dtype=float) for k, v in st["exog_tails"].items()},
        )


def fit_arimax(frame: TimeSeriesFrame, spec: ModelSpec,
               max_iter: int | None = None) -> FittedARIMAX:
    assert spec.kind is ModelKind.ARIMAX
    spec.validate_against(frame)
    hp = spec.arimax
    p, d, q = hp.p, hp.d, hp.q
    names = [spec.target, *spec.exogenous]
    start = complete_suffix(frame, names)
    n = len(frame) - start
    k = len(spec.exogenous)
    if n - d <= p + q + k + 5:
        raise InsufficientData(
            f"need n - d > p + q + n_exog + 5 ({p + q + k + 5}), have n - d = {n - d}")

    y = frame.column(spec.target)[start:]
    if np.any(np.isnan(y)):
        raise MissingData("target has interior gaps; forward-fill before fitting")
    w = _difference(y, d)

    # regress out the exogenous terms in differenced space
    exog_coefs: dict[str, float] = {}
    u = w.copy()
    if k:
        Z = np.column_stack([_difference(frame.column(v)[start:], d) for v in spec.exogenous])
        if np.any(np.isnan(Z)):
            raise MissingData("exogenous series have interior gaps")
        X = np.column_stack([np.ones(len(w)), Z])
        coefs, _ = ols_qr(X, w)
        beta = coefs[1:]
        exog_coefs = {v: float(b) for v, b in zip(spec.exogenous, beta)}
        u = w - Z @ beta

    n_params = 1 + p + q
    if p == 0 and q == 0:
        # CSS is quadratic in the intercept alone; closed form
        intercept = float(u.mean())
        phi = np.zeros(0)
        theta = np.zeros(0)
    else:
        x0 = np.zeros(n_params)
        x0[0] = u.mean()
        res = minimize(
            _css_value, x0, args=(u, p, q), method="Nelder-Mead",
            options={"xatol": 1e-8, "fatol": 1e-10,
                     "maxiter": max_iter or 2000 * n_params, "maxfev": 4000 * n_params})
        if not res.success:
            raise FitDidNotConverge(f"simplex search stopped: {res.message}")
        intercept = float(res.x[0])
        phi = res.x[1 : 1 + p].copy()
        theta = res.x[1 + p :].copy()

    eps = css_residuals(u, intercept, phi, theta)
    ssr = float(eps[p:] @ eps[p:])
    dof = max(len(u) - p - (n_params + k), 1)
    sigma = math.sqrt(ssr / dof)

    target_tails = np.array([_difference(y, i)[-1] for i in range(d)])
    exog_tails = {v: frame.column(v)[start:][len(y) - d :].copy() if d else np.zeros(0)
                  for v in spec.exogenous}
    return FittedARIMAX(
        spec=spec,
        residual_sigma=sigma,
        fit_range=(frame.index[start], frame.index[-1]),
        ar=phi,
        ma=theta,
        exog_coefficients=exog_coefs,
        intercept=intercept,
        d=d,
        target_tails=target_tails,
        u_tail=u[len(u) - p :].copy() if p else np.zeros(0),
        eps_tail=eps[len(eps) - q :].copy() if q else np.zeros(0),
        exog_tails=exog_tails,
    )


def forecast_arimax(model: FittedARIMAX, exog_paths: dict[str, np.ndarray],
                    horizon: int) -> Forecast:
    paths = check_exog_paths(model.spec, exog_paths, horizon)
    p, q, d = len(model.ar), len(model.ma), model.d

    # exogenous contribution in differenced space
    exog_part = np.zeros(horizon)
    for name in model.spec.exogenous:
        full = np.r_[model.exog_tails[name], paths[name]]
        exog_part += model.exog_coefficients[name] * _difference(full, d)

    u_hist = list(model.u_tail)
    eps_hist = list(model.eps_tail)
    w_hat = np.zeros(horizon)
    for s in range(horizon):
        val = model.intercept
        for j in range(1, p + 1):
            if len(u_hist) >= j:
                val += model.ar[j - 1] * u_hist[-j]
        for m in range(1, q + 1):
            if len(eps_hist) >= m:
                val += model.ma[m - 1] * eps_hist[-m]
        u_hist.append(val)
        eps_hist.append(0.0)  # future innovations are zero
        w_hat[s] = val + exog_part[s]

    # integrate d times from the stored level/difference tails
    tails = list(model.target_tails)
    values = np.zeros(horizon)
    for s in range(horizon):
        x = w_hat[s]
        for i in range(d - 1, -1, -1):
            tails[i] += x
            x = tails[i]
        values[s] = x if d else w_hat[s]
    return Forecast(ModelKind.ARIMAX, horizon, values, model.fit_range[1])
