import datetime as dt

import numpy as np
import pytest

from freightwhatif.timeseries import TimeSeriesFrame

MONDAY = dt.date(2021, 1, 4)


def make_frame(columns: dict[str, list | np.ndarray], start: dt.date = MONDAY,
               metadata: dict | None = None) -> TimeSeriesFrame:
    """Assemble a weekly frame from per-variable columns."""
    names = list(columns)
    values = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    index = [start + dt.timedelta(weeks=i) for i in range(len(values))]
    return TimeSeriesFrame(index, names, values, metadata=metadata)


@pytest.fixture
def exact_linear_frame() -> TimeSeriesFrame:
    """y = 1 + 2x with no noise, n = 10."""
    x = np.arange(10, dtype=float)
    return make_frame({"y": 1.0 + 2.0 * x, "x": x})
