import datetime as dt
import math

import numpy as np
import pytest

from freightwhatif.errors import (
    DuplicateIndex,
    EmptyFrame,
    EmptySeries,
    InvalidWindow,
    MissingVariable,
    ParseError,
    WindowTooLarge,
)
from freightwhatif.timeseries import (
    TimeSeriesFrame,
    bollinger,
    forward_fill,
    load_frame,
    near_term_window,
    serialize_frame,
    value_range,
)

from conftest import make_frame

NAN = math.nan


class TestLoadFrame:
    def test_three_row_csv(self):
        frame = load_frame("date,x\n2021-01-04,1\n2021-01-11,2\n2021-01-18,3\n")
        assert len(frame) == 3
        assert frame.variables == ["x"]
        assert frame.values[:, 0].tolist() == [1.0, 2.0, 3.0]

    def test_shuffled_rows_sort_to_same_frame(self):
        a = load_frame("date,x\n2021-01-04,1\n2021-01-11,2\n2021-01-18,3\n")
        b = load_frame("date,x\n2021-01-18,3\n2021-01-04,1\n2021-01-11,2\n")
        assert a.index == b.index
        assert np.array_equal(a.values, b.values)

    def test_invalid_date_names_row(self):
        with pytest.raises(ParseError) as exc:
            load_frame("date,x\n2021-01-04,1\n2021-13-40,2\n")
        assert exc.value.row == 3

    def test_duplicate_date_rejected(self):
        with pytest.raises(DuplicateIndex):
            load_frame("date,x\n2021-01-04,1\n2021-01-04,2\n")

    def test_zero_variables(self):
        with pytest.raises(EmptyFrame):
            load_frame("date\n2021-01-04\n")

    def test_missing_cells_become_nan(self):
        frame = load_frame("date,x,y\n2021-01-04,1,\n2021-01-11,,2\n")
        assert math.isnan(frame.values[0, 1])
        assert math.isnan(frame.values[1, 0])

    def test_bad_number_names_row_and_column(self):
        with pytest.raises(ParseError, match="'y'"):
            load_frame("date,x,y\n2021-01-04,1,zap\n")

    def test_non_weekly_spacing_rejected_unless_disabled(self):
        text = "date,x\n2021-01-04,1\n2021-01-06,2\n"
        with pytest.raises(ValueError):
            load_frame(text)
        frame = load_frame(text, check_spacing=False)
        assert len(frame) == 2

    def test_csv_round_trip_bit_exact(self):
        text = "date,x,y\n2021-01-04,1.25,\n2021-01-11,-3.1,7\n2021-01-18,0.1,2e-4\n"
        first = load_frame(text)
        second = load_frame(serialize_frame(first))
        assert first.index == second.index
        assert first.variables == second.variables
        assert np.array_equal(first.values, second.values, equal_nan=True)

    def test_json_round_trip(self):
        frame = load_frame("date,x\n2021-01-04,1\n2021-01-11,\n")
        doc = frame.to_json_dict()
        assert doc["values"][1][0] is None
        back = TimeSeriesFrame.from_json_dict(doc)
        assert back.index == frame.index
        assert np.array_equal(back.values, frame.values, equal_nan=True)


class TestFrameInvariants:
    def test_row_count_mismatch(self):
        with pytest.raises(ValueError):
            TimeSeriesFrame([dt.date(2021, 1, 4)], ["x"], np.zeros((2, 1)))

    def test_duplicate_variable_names(self):
        with pytest.raises(ValueError):
            make_frame({"x": [1.0]}) and TimeSeriesFrame(
                [dt.date(2021, 1, 4)], ["x", "x"], np.zeros((1, 2)))

    def test_values_frozen(self):
        frame = make_frame({"x": [1.0, 2.0]})
        with pytest.raises(ValueError):
            frame.values[0, 0] = 9.0

    def test_column_unknown_variable(self):
        frame = make_frame({"x": [1.0, 2.0]})
        with pytest.raises(MissingVariable):
            frame.column("nope")


class TestForwardFill:
    def test_window_one(self):
        out = forward_fill(np.array([1.0, NAN, NAN]), window=1)
        assert out[0] == 1.0 and out[1] == 1.0 and math.isnan(out[2])

    def test_window_two(self):
        out = forward_fill(np.array([1.0, NAN, NAN]), window=2)
        assert out.tolist() == [1.0, 1.0, 1.0]

    def test_no_prior_value(self):
        out = forward_fill(np.array([NAN, 5.0]), window=3)
        assert math.isnan(out[0]) and out[1] == 5.0

    def test_zero_window(self):
        with pytest.raises(InvalidWindow):
            forward_fill(np.array([1.0]), window=0)

    def test_matches_definition_oracle(self):
        # brute force: each NaN takes the closest earlier observed value
        # within `window`, measured on the input
        rng = np.random.Generator(np.random.PCG64(5))
        for _ in range(50):
            s = rng.normal(size=30)
            s[rng.random(30) < 0.4] = NAN
            w = int(rng.integers(1, 6))
            out = forward_fill(s, w)
            for t in range(len(s)):
                if not math.isnan(s[t]):
                    assert out[t] == s[t]
                    continue
                sources = [j for j in range(max(0, t - w), t) if not math.isnan(s[j])]
                if sources:
                    assert out[t] == s[sources[-1]]
                else:
                    assert math.isnan(out[t])

    def test_idempotent_when_gaps_resolve(self):
        # a second pass is a no-op whenever no run was only partially
        # filled (gaps no longer than the window, or unreachable ones)
        rng = np.random.Generator(np.random.PCG64(11))
        for _ in range(50):
            s = rng.normal(size=30)
            w = int(rng.integers(1, 6))
            start = int(rng.integers(1, 25))
            gap = int(rng.integers(1, w + 1))
            s[start : start + gap] = NAN
            once = forward_fill(s, w)
            twice = forward_fill(once, w)
            assert np.array_equal(once, twice, equal_nan=True)

    def test_never_changes_observed_cells(self):
        rng = np.random.Generator(np.random.PCG64(6))
        for _ in range(50):
            s = rng.normal(size=25)
            s[rng.random(25) < 0.3] = NAN
            out = forward_fill(s, 2)
            mask = ~np.isnan(s)
            assert np.array_equal(out[mask], s[mask])


class TestBollinger:
    def test_constant_series_zero_variance(self):
        band = bollinger(np.array([5.0, 5.0, 5.0, 5.0]), window=2, k=2.0)
        for t in range(1, 4):
            assert band.middle[t] == band.upper[t] == band.lower[t] == 5.0
        assert math.isnan(band.middle[0])

    def test_hand_computed_band(self):
        # window 2, k 1: sigma_pop of {1,2} = 0.5, of {2,3} = 0.5
        band = bollinger(np.array([1.0, 2.0, 3.0]), window=2, k=1.0)
        assert math.isnan(band.middle[0])
        assert band.middle[1] == pytest.approx(1.5)
        assert band.middle[2] == pytest.approx(2.5)
        assert band.upper[1] == pytest.approx(2.0)
        assert band.upper[2] == pytest.approx(3.0)
        assert band.lower[1] == pytest.approx(1.0)

    def test_window_too_large(self):
        with pytest.raises(WindowTooLarge):
            bollinger(np.array([1.0, 2.0, 3.0]), window=5, k=2.0)

    def test_band_symmetry(self):
        rng = np.random.Generator(np.random.PCG64(7))
        s = rng.normal(size=60)
        band = bollinger(s, window=10, k=2.5)
        defined = ~np.isnan(band.middle)
        np.testing.assert_allclose(band.upper[defined] - band.middle[defined],
                                   band.middle[defined] - band.lower[defined], atol=1e-12)


class TestValueRange:
    def test_simple(self):
        assert value_range(np.array([1.0, 4.0, 2.0])) == (1.0, 4.0)

    def test_degenerate_padded(self):
        assert value_range(np.array([7.0, 7.0])) == (6.0, 8.0)

    def test_all_missing(self):
        with pytest.raises(EmptySeries):
            value_range(np.array([NAN]))

    def test_ignores_missing(self):
        assert value_range(np.array([NAN, 3.0, NAN, 9.0])) == (3.0, 9.0)


def test_near_term_window_is_last_four_weeks():
    frame = make_frame({"x": np.arange(10.0)})
    s = near_term_window(frame, "x")
    assert s.start == 6 and s.end == 10
    assert s.values.tolist() == [6.0, 7.0, 8.0, 9.0]
