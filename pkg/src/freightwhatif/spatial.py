"""Vessel records, great-circle geometry, and weekly supply aggregation.

Cargo status comes from the input data (red = ballast, blue = laden in
the map view); it is never inferred from draught. "Approaching" is a
heading-versus-bearing test within a configurable tolerance, since the
upstream data carries no destination field.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlreadyInPort,
    InvalidBBox,
    InvalidCoordinate,
    InvalidVesselRecord,
    UndefinedBearing,
)
from .timeseries import TimeSeriesFrame

EARTH_RADIUS_KM = 6371.0
DEFAULT_APPROACH_TOLERANCE_DEG = 45.0

IMO_WEIGHTS = (7, 6, 5, 4, 3, 2)


def imo_check_digit(first_six: int) -> int:
    digits = [int(c) for c in f"{first_six:06d}"]
    return sum(w * d for w, d in zip(IMO_WEIGHTS, digits)) % 10


def is_valid_imo(imo: int) -> bool:
    if not 1_000_000 <= imo <= 9_999_999:
        return False
    return imo % 10 == imo_check_digit(imo // 10)


class CargoStatus(enum.Enum):
    BALLAST = "ballast"
    LADEN = "laden"


@dataclass(frozen=True)
class VesselRecord:
    imo: int
    timestamp: dt.datetime
    lat: float
    lon: float
    heading: float
    speed_knots: float
    cargo_status: CargoStatus

    def __post_init__(self):
        if not is_valid_imo(self.imo):
            raise InvalidVesselRecord(f"IMO {self.imo} fails the check-digit rule")
        _check_coords(self.lat, self.lon)
        if not 0.0 <= self.heading < 360.0:
            raise InvalidVesselRecord(f"heading {self.heading} outside [0, 360)")
        if self.speed_knots < 0:
            raise InvalidVesselRecord(f"negative speed {self.speed_knots}")

    @property
    def position(self) -> tuple[float, float]:
        return (self.lat, self.lon)


@dataclass(frozen=True)
class PortRegion:
    name: str
    center: tuple[float, float]
    radius_km: float

    def __post_init__(self):
        if self.radius_km <= 0:
            raise ValueError("radius_km must be positive")
        _check_coords(*self.center)


def _check_coords(lat: float, lon: float) -> None:
    if not -90.0 <= lat <= 90.0:
        raise InvalidCoordinate(f"latitude {lat} outside [-90, 90]")
    if not -180.0 < lon <= 180.0:
        raise InvalidCoordinate(f"longitude {lon} outside (-180, 180]")


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance on a 6371 km sphere."""
    _check_coords(*a)
    _check_coords(*b)
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    s = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(s)))


def bearing_deg(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Initial great-circle bearing from a to b; 0 = north, 90 = east."""
    _check_coords(*a)
    _check_coords(*b)
    if a == b:
        raise UndefinedBearing("bearing undefined for coincident points")
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    dlon = lon2 - lon1
    y = math.sin(dlon) * math.cos(lat2)
    x = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    return math.degrees(math.atan2(y, x)) % 360.0


def circular_deg_distance(a: float, b: float) -> float:
    """Shortest angular distance between two headings, in [0, 180]."""
    return abs((a - b + 180.0) % 360.0 - 180.0)


def is_approaching(vessel: VesselRecord, port: PortRegion,
                   tolerance_deg: float = DEFAULT_APPROACH_TOLERANCE_DEG) -> bool:
    """True when the vessel's heading points at the port within tolerance."""
    if not 0.0 < tolerance_deg <= 180.0:
        raise ValueError(f"tolerance must be in (0, 180], got {tolerance_deg}")
    if haversine_km(vessel.position, port.center) <= port.radius_km:
        raise AlreadyInPort(f"vessel {vessel.imo} is inside {port.name!r}")
    to_port = bearing_deg(vessel.position, port.center)
    return circular_deg_distance(vessel.heading % 360.0, to_port) <= tolerance_deg


def week_start(ts: dt.datetime) -> dt.date:
    d = ts.date()
    return d - dt.timedelta(days=d.weekday())


def sanitize_port_name(name: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in name.lower())


def aggregate_supply(records: list[VesselRecord], port: PortRegion,
                     tolerance_deg: float = DEFAULT_APPROACH_TOLERANCE_DEG) -> TimeSeriesFrame:
    """Weekly count of distinct ballast vessels heading for the port.

    The latest record per vessel per week decides, so message frequency
    cannot inflate the count. Vessels already inside the radius are
    present, not approaching, and do not count. The output spans every
    week between the first and last record and is a valid exogenous
    variable for the model layer.
    """
    variable = f"ballast_approaching_{sanitize_port_name(port.name)}"
    if not records:
        return TimeSeriesFrame([], [variable], np.zeros((0, 1)))
    latest: dict[tuple[dt.date, int], VesselRecord] = {}
    for rec in records:
        key = (week_start(rec.timestamp), rec.imo)
        cur = latest.get(key)
        if cur is None or rec.timestamp >= cur.timestamp:
            latest[key] = rec
    weeks = sorted({week_start(r.timestamp) for r in records})
    first, last = weeks[0], weeks[-1]
    index = []
    w = first
    while w <= last:
        index.append(w)
        w += dt.timedelta(days=7)
    counts = {w: 0 for w in index}
    for (week, _imo), rec in latest.items():
        if rec.cargo_status is not CargoStatus.BALLAST:
            continue
        try:
            if is_approaching(rec, port, tolerance_deg):
                counts[week] += 1
        except AlreadyInPort:
            continue
    values = np.array([[float(counts[w])] for w in index])
    return TimeSeriesFrame(index, [variable], values)


def vessels_in_view(records: list[VesselRecord],
                    bbox: tuple[float, float, float, float],
                    at: dt.datetime) -> list[VesselRecord]:
    """Latest record per IMO at or before ``at``, inside the bbox."""
    lat_min, lon_min, lat_max, lon_max = bbox
    if lat_min > lat_max or lon_min > lon_max:
        raise InvalidBBox(f"bbox is inverted: {bbox}")
    latest: dict[int, VesselRecord] = {}
    for rec in records:
        if rec.timestamp > at:
            continue
        cur = latest.get(rec.imo)
        if cur is None or rec.timestamp >= cur.timestamp:
            latest[rec.imo] = rec
    out = [r for r in latest.values()
           if lat_min <= r.lat <= lat_max and lon_min <= r.lon <= lon_max]
    out.sort(key=lambda r: r.imo)
    return out


VESSEL_CSV_HEADER = ["imo", "timestamp", "lat", "lon", "heading", "speed_knots", "cargo_status"]


def load_vessel_csv(source) -> list[VesselRecord]:
    """Parse the vessel CSV wire format, failing on the first bad row."""
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
        raise InvalidVesselRecord("empty vessel CSV") from None
    if [h.strip() for h in header] != VESSEL_CSV_HEADER:
        raise InvalidVesselRecord(f"header must be {','.join(VESSEL_CSV_HEADER)}", row=1)
    records = []
    for lineno, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(VESSEL_CSV_HEADER):
            raise InvalidVesselRecord(f"expected {len(VESSEL_CSV_HEADER)} cells", row=lineno)
        try:
            imo = int(cells[0])
            ts = dt.datetime.fromisoformat(cells[1].strip())
            lat, lon, heading, speed = (float(c) for c in cells[2:6])
            status = CargoStatus(cells[6].strip().lower())
        except ValueError as exc:
            raise InvalidVesselRecord(str(exc), row=lineno) from None
        try:
            records.append(VesselRecord(imo, ts, lat, lon, heading, speed, status))
        except (InvalidVesselRecord, InvalidCoordinate) as exc:
            raise InvalidVesselRecord(str(exc), row=lineno) from None
    return records


def serialize_vessel_csv(records: list[VesselRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(VESSEL_CSV_HEADER)
    for r in records:
        writer.writerow([r.imo, r.timestamp.isoformat(), repr(r.lat), repr(r.lon),
                         repr(r.heading), repr(r.speed_knots), r.cargo_status.value])
    return out.getvalue()
