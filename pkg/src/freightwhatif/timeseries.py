"""Aligned weekly multivariate series: ingestion, filling, rolling stats.

The frame is the single data substrate shared by the model, scenario,
evaluation and service layers. Missing cells are NaN in memory, empty
cells in CSV, and ``null`` in JSON.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateIndex,
    EmptyFrame,
    EmptySeries,
    InvalidWindow,
    MissingVariable,
    ParseError,
    WindowTooLarge,
)

WEEK = dt.timedelta(days=7)


def _parse_date(text: str, row: int) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise ParseError(f"invalid date {text!r}", row=row) from None


def _parse_cell(text: str, row: int, column: str) -> float:
    text = text.strip()
    if text == "":
        return math.nan
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"invalid number {text!r} in column {column!r}", row=row) from None


@dataclass
class TimeSeriesFrame:
    """Weekly observations of named variables; cells may be NaN (missing).

    ``values`` has one row per period and one column per variable. The
    array is frozen after validation so frames can be shared across
    threads without copying.
    """

    index: list[dt.date]
    variables: list[str]
    values: np.ndarray
    metadata: dict | None = field(default=None, compare=False)
    check_spacing: bool = True

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        n, m = self.values.shape
        if n != len(self.index):
            raise ValueError(f"{n} value rows but {len(self.index)} index entries")
        if m != len(self.variables):
            raise ValueError(f"{m} value columns but {len(self.variables)} variables")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be unique")
        if any(not v for v in self.variables):
            raise ValueError("variable names must be non-empty")
        for a, b in zip(self.index, self.index[1:]):
            if b <= a:
                raise ValueError(f"index not strictly increasing at {b}")
            if self.check_spacing and b - a != WEEK:
                raise ValueError(f"non-weekly spacing between {a} and {b}")
        self.values.flags.writeable = False

    def __len__(self) -> int:
        return len(self.index)

    def column(self, variable: str) -> np.ndarray:
        try:
            j = self.variables.index(variable)
        except ValueError:
            raise MissingVariable(variable) from None
        return self.values[:, j]

    def has_variable(self, variable: str) -> bool:
        return variable in self.variables

    def head(self, n: int) -> "TimeSeriesFrame":
        return TimeSeriesFrame(self.index[:n], list(self.variables),
                               self.values[:n].copy(), metadata=self.metadata,
                               check_spacing=self.check_spacing)

    def tail(self, n: int) -> "TimeSeriesFrame":
        return TimeSeriesFrame(self.index[-n:], list(self.variables),
                               self.values[-n:].copy(), metadata=self.metadata,
                               check_spacing=self.check_spacing)

    def to_json_dict(self) -> dict:
        vals = [[None if math.isnan(v) else v for v in row] for row in self.values.tolist()]
        return {
            "index": [d.isoformat() for d in self.index],
            "variables": list(self.variables),
            "values": vals,
        }

    @classmethod
    def from_json_dict(cls, doc: dict, check_spacing: bool = True) -> "TimeSeriesFrame":
        index = [dt.date.fromisoformat(s) for s in doc["index"]]
        values = np.array(
            [[math.nan if v is None else float(v) for v in row] for row in doc["values"]],
            dtype=float,
        ).reshape(len(index), len(doc["variables"]))
        return cls(index, list(doc["variables"]), values, check_spacing=check_spacing)


@dataclass(frozen=True)
class SeriesSlice:
    """A contiguous view of one variable; ``end`` is exclusive."""

    variable: str
    start: int
    end: int
    values: np.ndarray

    def __post_init__(self):
        if not (0 <= self.start <= self.end):
            raise ValueError("require 0 <= start <= end")
        if len(self.values) != self.end - self.start:
            raise ValueError("values length must match [start, end)")


@dataclass(frozen=True)
class BollingerBand:
    middle: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    window: int
    k: float


def load_frame(source, check_spacing: bool = True) -> TimeSeriesFrame:
    """Parse CSV (first column ``date``, remaining columns variables).

    Rows are sorted by date; duplicate dates and malformed cells are
    rejected with the offending row number (1-based, header = row 1).
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyFrame("empty CSV") from None
    if not header or header[0].strip() != "date":
        raise ParseError("first column header must be 'date'", row=1)
    variables = [h.strip() for h in header[1:]]
    if not variables:
        raise EmptyFrame("no variable columns")

    rows: list[tuple[dt.date, list[float]]] = []
    seen: set[dt.date] = set()
    for lineno, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(variables) + 1:
            raise ParseError(f"expected {len(variables) + 1} cells, got {len(cells)}", row=lineno)
        d = _parse_date(cells[0], lineno)
        if d in seen:
            raise DuplicateIndex(d)
        seen.add(d)
        rows.append((d, [_parse_cell(c, lineno, variables[j]) for j, c in enumerate(cells[1:])]))
    if not rows:
        raise EmptyFrame("no data rows")
    rows.sort(key=lambda r: r[0])
    index = [r[0] for r in rows]
    values = np.array([r[1] for r in rows], dtype=float)
    return TimeSeriesFrame(index, variables, values, check_spacing=check_spacing)


def serialize_frame(frame: TimeSeriesFrame) -> str:
    """CSV inverse of :func:`load_frame`; floats use shortest round-trip repr."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["date"] + list(frame.variables))
    for d, row in zip(frame.index, frame.values):
        writer.writerow([d.isoformat()] + ["" if math.isnan(v) else repr(float(v)) for v in row])
    return out.getvalue()


def frame_to_json(frame: TimeSeriesFrame) -> str:
    return json.dumps(frame.to_json_dict())


def forward_fill(series: np.ndarray, window: int) -> np.ndarray:
    """Replace each NaN with the most recent value at distance <= window."""
    if window < 1:
        raise InvalidWindow(f"window must be >= 1, got {window}")
    series = np.asarray(series, dtype=float)
    out = series.copy()
    last_value = math.nan
    last_pos = -1
    for t in range(len(out)):
        if math.isnan(out[t]):
            if last_pos >= 0 and t - last_pos <= window:
                out[t] = last_value
        else:
            last_value = out[t]
            last_pos = t
    return out


def bollinger(series: np.ndarray, window: int, k: float) -> BollingerBand:
    """Rolling mean with +/- k population standard deviations.

    The first ``window - 1`` positions are NaN (band undefined).
    """
    series = np.asarray(series, dtype=float)
    n = len(series)
    if window < 1:
        raise InvalidWindow(f"window must be >= 1, got {window}")
    if k <= 0:
        raise InvalidWindow(f"k must be positive, got {k}")
    if window > n:
        raise WindowTooLarge(f"window {window} exceeds series length {n}")
    middle = np.full(n, math.nan)
    upper = np.full(n, math.nan)
    lower = np.full(n, math.nan)
    for t in range(window - 1, n):
        seg = series[t - window + 1 : t + 1]
        mu = seg.mean()
        sigma = math.sqrt(np.mean((seg - mu) ** 2))
        middle[t] = mu
        upper[t] = mu + k * sigma
        lower[t] = mu - k * sigma
    return BollingerBand(middle, upper, lower, window, k)


def value_range(series: np.ndarray) -> tuple[float, float]:
    """(min, max) over non-missing values; padded +/-1 when degenerate.

    The padding keeps the UI drag scale well-defined: the pixel-to-value
    conversion divides by (max - min).
    """
    series = np.asarray(series, dtype=float)
    finite = series[~np.isnan(series)]
    if finite.size == 0:
        raise EmptySeries("no observed values")
    lo = float(finite.min())
    hi = float(finite.max())
    if lo == hi:
        return lo - 1.0, hi + 1.0
    return lo, hi


def near_term_window(frame: TimeSeriesFrame, variable: str, weeks: int = 4) -> SeriesSlice:
    """Most recent ``weeks`` observations of one variable."""
    col = frame.column(variable)
    start = max(0, len(frame) - weeks)
    return SeriesSlice(variable, start, len(frame), col[start:].copy())


def last_observed(frame: TimeSeriesFrame, variable: str) -> float:
    """Latest non-missing value of a variable."""
    col = frame.column(variable)
    finite = np.flatnonzero(~np.isnan(col))
    if finite.size == 0:
        raise EmptySeries(f"variable {variable!r} has no observed values")
    return float(col[finite[-1]])
