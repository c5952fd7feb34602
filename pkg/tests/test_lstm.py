import datetime as dt

import numpy as np
import pytest

from freightwhatif.errors import DivergedTraining, InsufficientData, InvalidHorizon
from freightwhatif.models import (
    FittedLSTM,
    LstmParams,
    ModelKind,
    ModelSpec,
    fit_lstm,
    forecast_lstm,
    load_model_json,
    lstm_gradient_check,
    model_to_json,
)
from freightwhatif.models.lstm import PARAM_KEYS, init_weights

from conftest import make_frame


def tiny_frame(n=20, seed=4, extra=None):
    rng = np.random.Generator(np.random.PCG64(seed))
    cols = {"y": rng.normal(size=n)}
    if extra:
        cols[extra] = rng.normal(size=n)
    return make_frame(cols)


class TestGradientCheck:
    @pytest.mark.parametrize("seed,hidden,window", [(1, 2, 2), (9, 4, 3), (3, 3, 2)])
    def test_max_relative_error_small(self, seed, hidden, window):
        spec = ModelSpec(ModelKind.LSTM, "y", (),
                         LstmParams(window=window, hidden_size=hidden, epochs=0, seed=seed))
        err = lstm_gradient_check(spec, tiny_frame(seed=seed + 40))
        assert err < 1e-4

    def test_with_exogenous_input(self):
        spec = ModelSpec(ModelKind.LSTM, "y", ("x",),
                         LstmParams(window=3, hidden_size=4, epochs=0, seed=2))
        err = lstm_gradient_check(spec, tiny_frame(seed=77, extra="x"))
        assert err < 1e-4

    def test_zero_gradients_define_zero_error(self):
        # constant series standardizes to all-zero inputs and labels; with
        # zero output weights many gradients vanish on both sides
        spec = ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=2, hidden_size=2,
                                                             epochs=0, seed=1))
        frame = make_frame({"y": np.full(20, 5.0)})
        err = lstm_gradient_check(spec, frame)
        assert np.isfinite(err)
        assert err < 1e-4


class TestFit:
    def test_constant_series_predicts_the_constant(self):
        frame = make_frame({"y": np.full(30, 10.0)})
        spec = ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=4, hidden_size=4,
                                                             epochs=50, seed=0))
        model = fit_lstm(frame, spec)
        fc = forecast_lstm(model, {}, 1)
        assert abs(fc.values[0] - 10.0) < 0.1
        assert model.loss_history[-1] < 1e-3

    def test_identical_seed_gives_bitwise_identical_weights(self):
        frame = tiny_frame(n=40, seed=12)
        spec = ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=3, hidden_size=5,
                                                             epochs=25, seed=7))
        a = fit_lstm(frame, spec)
        b = fit_lstm(frame, spec)
        for key in PARAM_KEYS:
            assert np.array_equal(a.weights[key], b.weights[key])

    def test_zero_epochs_flagged_untrained(self):
        frame = tiny_frame(n=40)
        spec = ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=3, hidden_size=3,
                                                             epochs=0, seed=1))
        model = fit_lstm(frame, spec)
        assert model.trained is False
        assert model.loss_history == ()
        init = init_weights(1, 1, 3)
        for key in PARAM_KEYS:
            assert np.array_equal(model.weights[key], init[key])

    def test_too_short_series(self):
        frame = tiny_frame(n=12)
        spec = ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=4, hidden_size=2,
                                                             epochs=1, seed=1))
        with pytest.raises(InsufficientData):
            fit_lstm(frame, spec)

    def test_divergence_detected(self):
        frame = tiny_frame(n=60, seed=30)
        spec = ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=3, hidden_size=6,
                                                             epochs=400, learning_rate=40.0,
                                                             seed=2))
        with pytest.raises(DivergedTraining):
            fit_lstm(frame, spec)

    def test_training_reduces_loss(self):
        frame = tiny_frame(n=60, seed=3)
        spec = ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=4, hidden_size=6,
                                                             epochs=150, learning_rate=0.05,
                                                             seed=5))
        model = fit_lstm(frame, spec)
        assert model.loss_history[-1] < model.loss_history[0]


class TestForecast:
    def zero_weight_model(self, mean=7.0, std=2.0):
        hidden, window = 3, 2
        weights = {k: np.zeros_like(v) for k, v in init_weights(0, 1, hidden).items()}
        return FittedLSTM(
            spec=ModelSpec(ModelKind.LSTM, "y", (), LstmParams(window=window,
                                                               hidden_size=hidden,
                                                               epochs=0, seed=0)),
            residual_sigma=0.0,
            fit_range=(dt.date(2021, 1, 4), dt.date(2021, 3, 1)),
            weights=weights,
            input_variables=("y",),
            means=np.array([mean]),
            stds=np.array([std]),
            window=window,
            hidden_size=hidden,
            trained=False,
            loss_history=(),
            context_rows=np.array([[6.0], [8.0]]),
        )

    def test_zero_weights_forecast_training_mean(self):
        model = self.zero_weight_model(mean=7.0)
        fc = forecast_lstm(model, {}, 4)
        assert fc.values.tolist() == [7.0] * 4

    def test_zero_horizon(self):
        with pytest.raises(InvalidHorizon):
            forecast_lstm(self.zero_weight_model(), {}, 0)

    def test_deterministic_given_model_and_paths(self):
        frame = tiny_frame(n=40, seed=9, extra="x")
        spec = ModelSpec(ModelKind.LSTM, "y", ("x",), LstmParams(window=3, hidden_size=4,
                                                                 epochs=20, seed=3))
        model = fit_lstm(frame, spec)
        paths = {"x": np.linspace(-1, 1, 5)}
        a = forecast_lstm(model, paths, 5).values
        b = forecast_lstm(model, paths, 5).values
        np.testing.assert_array_equal(a, b)


def test_gradient_check_across_five_seeds():
    for seed in (1, 2, 3, 4, 5):
        spec = ModelSpec(ModelKind.LSTM, "y", (),
                         LstmParams(window=3, hidden_size=4, epochs=0, seed=seed))
        assert lstm_gradient_check(spec, tiny_frame(seed=seed + 100)) < 1e-4


def test_json_round_trip():
    frame = tiny_frame(n=40, seed=2, extra="x")
    spec = ModelSpec(ModelKind.LSTM, "y", ("x",), LstmParams(window=3, hidden_size=4,
                                                             epochs=15, seed=6))
    model = fit_lstm(frame, spec)
    back = load_model_json(model_to_json(model))
    paths = {"x": np.zeros(4)}
    np.testing.assert_array_equal(forecast_lstm(model, paths, 4).values,
                                  forecast_lstm(back, paths, 4).values)
    for key in PARAM_KEYS:
        assert np.array_equal(back.weights[key], model.weights[key])
