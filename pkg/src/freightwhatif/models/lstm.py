"""Single-layer LSTM trained from first principles.

Inputs at step t are the standardized (target + exogenous) values at
that week; supervision is the next week's standardized target, over all
sliding windows of the configured length. Training is full-batch
backpropagation through time with plain gradient descent at a fixed
learning rate. Initialization draws every parameter uniformly from
+/- 1/sqrt(hidden_size) using a seeded PCG64 generator, so identical
seed, data and hyperparameters reproduce bitwise-identical weights.

Standardization statistics are frozen at fit time; forecast inputs are
scaled with them so scenario paths cannot shift the model's input
scale. Multi-step forecasting is recursive: the predicted target is fed
back together with the scenario-supplied exogenous values.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from ..errors import DivergedTraining, InsufficientData, MissingData
from ..timeseries import TimeSeriesFrame
from .arimax import complete_suffix
from .base import Forecast, FittedModel, ModelKind, ModelSpec, check_exog_paths

PARAM_KEYS = ("W", "U", "b", "w_out", "b_out")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # exp overflow saturates to the correct limit; divergence is caught
    # by the loss finiteness check, not here
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def init_weights(seed: int, n_inputs: int, hidden: int) -> dict[str, np.ndarray]:
    """Uniform +/- 1/sqrt(hidden) for every parameter, seeded PCG64.

    Gate blocks are stacked (input, forget, cell, output) along the
    first axis of W, U and b.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    bound = 1.0 / np.sqrt(hidden)
    return {
        "W": rng.uniform(-bound, bound, (4 * hidden, n_inputs)),
        "U": rng.uniform(-bound, bound, (4 * hidden, hidden)),
        "b": rng.uniform(-bound, bound, 4 * hidden),
        "w_out": rng.uniform(-bound, bound, hidden),
        "b_out": rng.uniform(-bound, bound, 1),
    }


def _forward(weights: dict[str, np.ndarray], X: np.ndarray):
    """X: (batch, window, inputs) -> (predictions, last hidden, step cache)."""
    batch, window, _ = X.shape
    hidden = weights["U"].shape[1]
    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    cache = []
    for t in range(window):
        z = X[:, t] @ weights["W"].T + h @ weights["U"].T + weights["b"]
        i = _sigmoid(z[:, :hidden])
        f = _sigmoid(z[:, hidden : 2 * hidden])
        g = np.tanh(z[:, 2 * hidden : 3 * hidden])
        o = _sigmoid(z[:, 3 * hidden :])
        c_new = f * c + i * g
        h_new = o * np.tanh(c_new)
        cache.append((X[:, t], h, c, i, f, g, o, c_new))
        h, c = h_new, c_new
    pred = h @ weights["w_out"] + weights["b_out"][0]
    return pred, h, cache


def loss_and_gradients(weights: dict[str, np.ndarray], X: np.ndarray,
                       y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Mean squared error and its gradient w.r.t. every parameter."""
    batch = X.shape[0]
    hidden = weights["U"].shape[1]
    pred, h_last, cache = _forward(weights, X)
    err = pred - y
    with np.errstate(over="ignore"):
        loss = float(np.mean(err**2))
    dpred = 2.0 * err / batch
    grads = {k: np.zeros_like(v) for k, v in weights.items()}
    grads["w_out"] = h_last.T @ dpred
    grads["b_out"] = np.array([dpred.sum()])
    dh = np.outer(dpred, weights["w_out"])
    dc_next = np.zeros((batch, hidden))
    for t in range(X.shape[1] - 1, -1, -1):
        x_t, h_prev, c_prev, i, f, g, o, c_new = cache[t]
        tc = np.tanh(c_new)
        do = dh * tc
        dc = dc_next + dh * o * (1 - tc**2)
        df = dc * c_prev
        di = dc * g
        dg = dc * i
        dc_next = dc * f
        dz = np.concatenate(
            [di * i * (1 - i), df * f * (1 - f), dg * (1 - g**2), do * o * (1 - o)], axis=1)
        grads["W"] += dz.T @ x_t
        grads["U"] += dz.T @ h_prev
        grads["b"] += dz.sum(axis=0)
        dh = dz @ weights["U"]
    return loss, grads


def flatten_params(weights: dict[str, np.ndarray]) -> np.ndarray:
    return np.concatenate([weights[k].ravel() for k in PARAM_KEYS])


def unflatten_params(vec: np.ndarray, template: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    out = {}
    pos = 0
    for k in PARAM_KEYS:
        size = template[k].size
        out[k] = vec[pos : pos + size].reshape(template[k].shape).copy()
        pos += size
    return out


@dataclass(frozen=True)
class FittedLSTM(FittedModel):
    weights: dict[str, np.ndarray]
    input_variables: tuple[str, ...]   # target first, then exogenous
    means: np.ndarray
    stds: np.ndarray                   # zero-variance columns stored as 1.0
    window: int
    hidden_size: int
    trained: bool
    loss_history: tuple[float, ...]
    context_rows: np.ndarray           # last `window` raw input rows

    def standardize(self, rows: np.ndarray) -> np.ndarray:
        return (rows - self.means) / self.stds

    def to_doc(self) -> dict:
        doc = self._base_doc()
        doc["parameters"] = {
            "weights": {k: self.weights[k].tolist() for k in PARAM_KEYS},
            "input_variables": list(self.input_variables),
            "means": [float(v) for v in self.means],
            "stds": [float(v) for v in self.stds],
            "window": self.window,
            "hidden_size": self.hidden_size,
            "trained": self.trained,
            "loss_history": [float(v) for v in self.loss_history],
            "state": {"context_rows": [[float(x) for x in row] for row in self.context_rows]},
        }
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "FittedLSTM":
        p = doc["parameters"]
        return cls(
            spec=ModelSpec.from_doc(doc["spec"]),
            residual_sigma=doc["residual_sigma"],
            fit_range=(dt.date.fromisoformat(doc["fit_range"][0]),
                       dt.date.fromisoformat(doc["fit_range"][1])),
            weights={k: np.array(v, dtype=float) for k, v in p["weights"].items()},
            input_variables=tuple(p["input_variables"]),
            means=np.array(p["means"], dtype=float),
            stds=np.array(p["stds"], dtype=float),
            window=p["window"],
            hidden_size=p["hidden_size"],
            trained=p["trained"],
            loss_history=tuple(p["loss_history"]),
            context_rows=np.array(p["state"]["context_rows"], dtype=float),
        )


def _training_arrays(frame: TimeSeriesFrame, spec: ModelSpec):
    hp = spec.lstm
    names = [spec.target, *spec.exogenous]
    start = complete_suffix(frame, names)
    raw = np.column_stack([frame.column(v)[start:] for v in names])
    n = len(raw)
    if np.any(np.isnan(raw)):
        raise MissingData("series have interior gaps; forward-fill before fitting")
    if n <= hp.window + 10:
        raise InsufficientData(f"need n > window + 10 = {hp.window + 10}, have {n}")
    means = raw.mean(axis=0)
    stds = raw.std(axis=0)
    stds[stds == 0.0] = 1.0  # constant columns standardize to zero
    scaled = (raw - means) / stds
    n_samples = n - hp.window
    X = np.stack([scaled[s : s + hp.window] for s in range(n_samples)])
    y = scaled[hp.window :, 0]
    return start, raw, means, stds, X, y


def fit_lstm(frame: TimeSeriesFrame, spec: ModelSpec) -> FittedLSTM:
    assert spec.kind is ModelKind.LSTM
    spec.validate_against(frame)
    hp = spec.lstm
    start, raw, means, stds, X, y = _training_arrays(frame, spec)
    weights = init_weights(hp.seed, X.shape[2], hp.hidden_size)

    losses = []
    for _ in range(hp.epochs):
        loss, grads = loss_and_gradients(weights, X, y)
        if not np.isfinite(loss):
            raise DivergedTraining(f"loss became non-finite after {len(losses)} epochs")
        losses.append(loss)
        for k in PARAM_KEYS:
            weights[k] = weights[k] - hp.learning_rate * grads[k]

    final_loss, _ = loss_and_gradients(weights, X, y)
    if not np.isfinite(final_loss):
        raise DivergedTraining("final loss is non-finite")
    # residual scale in target units: std loss is on the standardized scale
    sigma = float(np.sqrt(final_loss) * stds[0])
    return FittedLSTM(
        spec=spec,
        residual_sigma=sigma,
        fit_range=(frame.index[start], frame.index[-1]),
        weights=weights,
        input_variables=(spec.target, *spec.exogenous),
        means=means,
        stds=stds,
        window=hp.window,
        hidden_size=hp.hidden_size,
        trained=hp.epochs > 0,
        loss_history=tuple(losses),
        context_rows=raw[-hp.window :].copy(),
    )


def forecast_lstm(model: FittedLSTM, exog_paths: dict[str, np.ndarray],
                  horizon: int) -> Forecast:
    paths = check_exog_paths(model.spec, exog_paths, horizon)
    window = model.standardize(model.context_rows).copy()
    exog_names = model.spec.exogenous
    values = np.zeros(horizon)
    for s in range(horizon):
        pred_std, _, _ = _forward(model.weights, window[None, :, :])
        pred_std = float(pred_std[0])
        values[s] = pred_std * model.stds[0] + model.means[0]
        # next input row: predicted target plus this step's scenario values
        nxt = np.empty(window.shape[1])
        nxt[0] = pred_std
        for j, name in enumerate(exog_names, start=1):
            nxt[j] = (paths[name][s] - model.means[j]) / model.stds[j]
        window = np.vstack([window[1:], nxt])
    return Forecast(ModelKind.LSTM, horizon, values, model.fit_range[1])


def lstm_gradient_check(spec: ModelSpec, frame: TimeSeriesFrame,
                        step: float = 1e-5) -> float:
    """Max relative error of analytic vs central finite-difference gradients.

    Both gradients count as zero when their magnitudes are below 1e-12;
    the relative error is 0 in that case.
    """
    assert spec.kind is ModelKind.LSTM
    hp = spec.lstm
    _, _, _, _, X, y = _training_arrays(frame, spec)
    X = X[:20]
    y = y[:20]
    weights = init_weights(hp.seed, X.shape[2], hp.hidden_size)
    _, grads = loss_and_gradients(weights, X, y)
    analytic = flatten_params(grads)
    theta = flatten_params(weights)
    numeric = np.zeros_like(theta)
    for idx in range(len(theta)):
        plus = theta.copy()
        plus[idx] += step
        minus = theta.copy()
        minus[idx] -= step
        lp, _ = loss_and_gradients(unflatten_params(plus, weights), X, y)
        lm, _ = loss_and_gradients(unflatten_params(minus, weights), X, y)
        numeric[idx] = (lp - lm) / (2 * step)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-12)
    rel = np.abs(analytic - numeric) / denom
    rel[(np.abs(analytic) < 1e-12) & (np.abs(numeric) < 1e-12)] = 0.0
    return float(rel.max())
