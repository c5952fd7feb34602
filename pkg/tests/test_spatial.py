import datetime as dt
import math

import numpy as np
import pytest

from freightwhatif.errors import (
    AlreadyInPort,
    InvalidBBox,
    InvalidCoordinate,
    InvalidVesselRecord,
    UndefinedBearing,
)
from freightwhatif.spatial import (
    CargoStatus,
    PortRegion,
    VesselRecord,
    aggregate_supply,
    bearing_deg,
    circular_deg_distance,
    haversine_km,
    imo_check_digit,
    is_approaching,
    is_valid_imo,
    load_vessel_csv,
    serialize_vessel_csv,
    vessels_in_view,
    week_start,
)

PORT = PortRegion("Tubarao", center=(-20.28, -40.24), radius_km=50.0)
T0 = dt.datetime(2021, 1, 4, 12, 0)


def vessel(imo=9074729, lat=0.0, lon=0.0, heading=0.0, status=CargoStatus.BALLAST,
           ts=T0, speed=10.0):
    return VesselRecord(imo, ts, lat, lon, heading, speed, status)


class TestImo:
    def test_known_valid(self):
        # 9074729: 9*7+0*6+7*5+4*4+7*3+2*2 = 139 -> check digit 9
        assert is_valid_imo(9074729)

    def test_check_digit_mismatch(self):
        assert not is_valid_imo(9074721)

    def test_too_short(self):
        assert not is_valid_imo(907472)

    def test_record_rejects_bad_imo(self):
        with pytest.raises(InvalidVesselRecord):
            vessel(imo=1234568)

    def test_check_digit_function(self):
        assert imo_check_digit(907472) == 9


class TestHaversine:
    def test_zero_distance(self):
        assert haversine_km((10.0, 20.0), (10.0, 20.0)) == 0.0

    def test_one_degree_longitude_at_equator(self):
        assert haversine_km((0.0, 0.0), (0.0, 1.0)) == pytest.approx(111.195, abs=0.01)

    def test_half_great_circle(self):
        assert haversine_km((0.0, 0.0), (0.0, 180.0)) == pytest.approx(20015.1, abs=1.0)

    def test_symmetry_and_triangle_inequality(self):
        rng = np.random.Generator(np.random.PCG64(14))
        for _ in range(100):
            pts = [(float(rng.uniform(-89, 89)), float(rng.uniform(-179, 179)))
                   for _ in range(3)]
            a, b, c = pts
            assert haversine_km(a, b) == pytest.approx(haversine_km(b, a), abs=1e-9)
            assert haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-6

    def test_out_of_bounds(self):
        with pytest.raises(InvalidCoordinate):
            haversine_km((91.0, 0.0), (0.0, 0.0))


class TestBearing:
    def test_due_north(self):
        assert bearing_deg((0.0, 0.0), (1.0, 0.0)) == 0.0

    def test_due_east(self):
        assert bearing_deg((0.0, 0.0), (0.0, 1.0)) == 90.0

    def test_due_south(self):
        assert bearing_deg((0.0, 0.0), (-1.0, 0.0)) == 180.0

    def test_due_west(self):
        assert bearing_deg((0.0, 0.0), (0.0, -1.0)) == 270.0

    def test_coincident_points(self):
        with pytest.raises(UndefinedBearing):
            bearing_deg((5.0, 5.0), (5.0, 5.0))

    def test_reverse_bearing_near_opposite_for_close_points(self):
        rng = np.random.Generator(np.random.PCG64(15))
        for _ in range(50):
            lat = float(rng.uniform(-60, 60))
            lon = float(rng.uniform(-170, 170))
            # a nearby point well under 100 km away
            lat2 = lat + float(rng.uniform(-0.4, 0.4))
            lon2 = lon + float(rng.uniform(-0.4, 0.4))
            if (lat, lon) == (lat2, lon2):
                continue
            fwd = bearing_deg((lat, lon), (lat2, lon2))
            back = bearing_deg((lat2, lon2), (lat, lon))
            assert circular_deg_distance(fwd, (back + 180.0) % 360.0) < 1.0


class TestApproaching:
    def test_due_south_heading_north(self):
        v = vessel(lat=-25.0, lon=-40.24, heading=0.0)
        assert is_approaching(v, PORT, tolerance_deg=45.0)

    def test_heading_away(self):
        v = vessel(lat=-25.0, lon=-40.24, heading=180.0)
        assert not is_approaching(v, PORT, tolerance_deg=45.0)

    def test_circular_wraparound(self):
        # heading 350 vs bearing 5: circular distance 15 <= 20
        assert circular_deg_distance(350.0, 5.0) == pytest.approx(15.0)
        port = PortRegion("p", center=(10.0, 0.0), radius_km=10.0)
        v = vessel(lat=0.0, lon=-0.4, heading=(bearing_deg((0.0, -0.4), (10.0, 0.0))
                                                - 15.0) % 360.0)
        assert is_approaching(v, port, tolerance_deg=20.0)
        assert not is_approaching(v, port, tolerance_deg=10.0)

    def test_inside_port_radius(self):
        v = vessel(lat=-20.3, lon=-40.25, heading=0.0)
        with pytest.raises(AlreadyInPort):
            is_approaching(v, PORT, tolerance_deg=45.0)

    def test_heading_normalization_invariance(self):
        for h in (0.0, 17.0, 123.4, 359.0):
            assert circular_deg_distance(h, 30.0) == pytest.approx(
                circular_deg_distance((h + 360.0) % 360.0, 30.0))


class TestAggregateSupply:
    def test_empty_records(self):
        frame = aggregate_supply([], PORT)
        assert len(frame) == 0
        assert frame.variables == ["ballast_approaching_tubarao"]

    def test_distinct_imo_once_per_week(self):
        recs = [vessel(lat=-25.0, lon=-40.24, heading=0.0,
                       ts=T0 + dt.timedelta(hours=h)) for h in (0, 6, 12)]
        frame = aggregate_supply(recs, PORT)
        assert len(frame) == 1
        assert frame.values[0, 0] == 1.0

    def test_laden_not_counted(self):
        ballast = vessel(lat=-25.0, lon=-40.24, heading=0.0)
        laden = vessel(imo=9074731, lat=-25.0, lon=-40.0, heading=0.0,
                       status=CargoStatus.LADEN)
        frame = aggregate_supply([ballast, laden], PORT)
        assert frame.values[0, 0] == 1.0

    def test_latest_record_decides(self):
        toward = vessel(lat=-25.0, lon=-40.24, heading=0.0, ts=T0)
        away = vessel(lat=-25.0, lon=-40.24, heading=180.0, ts=T0 + dt.timedelta(hours=1))
        frame = aggregate_supply([toward, away], PORT)
        assert frame.values[0, 0] == 0.0

    def test_weeks_between_records_are_zero_filled(self):
        first = vessel(lat=-25.0, lon=-40.24, heading=0.0, ts=T0)
        later = vessel(lat=-25.0, lon=-40.24, heading=0.0,
                       ts=T0 + dt.timedelta(weeks=2))
        frame = aggregate_supply([first, later], PORT)
        assert len(frame) == 3
        assert frame.values[:, 0].tolist() == [1.0, 0.0, 1.0]

    def test_matches_brute_force_recount(self):
        rng = np.random.Generator(np.random.PCG64(16))
        port = PortRegion("p", center=(0.0, 0.0), radius_km=100.0)
        for _ in range(50):
            records = []
            n = int(rng.integers(0, 25))
            for _ in range(n):
                base = int(rng.integers(100_000, 1_000_000))
                imo = base * 10 + imo_check_digit(base)
                ts = dt.datetime(2021, 1, 4) + dt.timedelta(
                    hours=float(rng.integers(0, 24 * 7 * 4)))
                records.append(VesselRecord(
                    imo=imo, timestamp=ts,
                    lat=float(rng.uniform(-30, 30)), lon=float(rng.uniform(-30, 30)),
                    heading=float(rng.uniform(0, 360)) % 360.0,
                    speed_knots=float(rng.uniform(0, 20)),
                    cargo_status=CargoStatus.BALLAST if rng.random() < 0.6
                    else CargoStatus.LADEN))
            frame = aggregate_supply(records, port, tolerance_deg=60.0)
            # brute force: per week, latest record per IMO, recount
            if not records:
                assert len(frame) == 0
                continue
            for w, row in zip(frame.index, frame.values):
                count = 0
                imos = {r.imo for r in records if week_start(r.timestamp) == w}
                for imo in imos:
                    week_recs = [r for r in records
                                 if r.imo == imo and week_start(r.timestamp) == w]
                    latest = max(week_recs, key=lambda r: r.timestamp)
                    if latest.cargo_status is not CargoStatus.BALLAST:
                        continue
                    if haversine_km(latest.position, port.center) <= port.radius_km:
                        continue
                    brg = bearing_deg(latest.position, port.center)
                    if circular_deg_distance(latest.heading, brg) <= 60.0:
                        count += 1
                assert row[0] == count


class TestVesselsInView:
    def test_empty(self):
        assert vessels_in_view([], (-1.0, -1.0, 1.0, 1.0), T0) == []

    def test_latest_wins(self):
        t1 = vessel(ts=T0, lat=0.5, lon=0.5)
        t2 = vessel(ts=T0 + dt.timedelta(hours=2), lat=0.6, lon=0.6)
        out = vessels_in_view([t1, t2], (-1.0, -1.0, 1.0, 1.0),
                              T0 + dt.timedelta(hours=3))
        assert out == [t2]

    def test_future_records_excluded(self):
        t2 = vessel(ts=T0 + dt.timedelta(hours=2), lat=0.6, lon=0.6)
        out = vessels_in_view([t2], (-1.0, -1.0, 1.0, 1.0), T0)
        assert out == []

    def test_bbox_filter(self):
        v = vessel(lat=10.0, lon=10.0)
        assert vessels_in_view([v], (-1.0, -1.0, 1.0, 1.0), T0) == []

    def test_inverted_bbox(self):
        with pytest.raises(InvalidBBox):
            vessels_in_view([], (1.0, 0.0, -1.0, 0.0), T0)


class TestVesselCsv:
    def test_round_trip(self):
        recs = [vessel(), vessel(imo=9074731, lat=3.5, lon=-7.25, heading=123.4,
                                 status=CargoStatus.LADEN)]
        text = serialize_vessel_csv(recs)
        back = load_vessel_csv(text)
        assert back == recs

    def test_bad_check_digit_names_row(self):
        text = ("imo,timestamp,lat,lon,heading,speed_knots,cargo_status\n"
                "9074729,2021-01-04T00:00:00,0,0,0,10,ballast\n"
                "9074721,2021-01-04T01:00:00,0,0,0,10,ballast\n")
        with pytest.raises(InvalidVesselRecord) as exc:
            load_vessel_csv(text)
        assert exc.value.row == 3

    def test_bad_status(self):
        text = ("imo,timestamp,lat,lon,heading,speed_knots,cargo_status\n"
                "9074729,2021-01-04T00:00:00,0,0,0,10,empty\n")
        with pytest.raises(InvalidVesselRecord):
            load_vessel_csv(text)

    def test_wrong_header(self):
        with pytest.raises(InvalidVesselRecord):
            load_vessel_csv("imo,when\n")


def test_week_start_is_monday():
    assert week_start(dt.datetime(2021, 1, 7, 23, 0)) == dt.date(2021, 1, 4)
    assert week_start(dt.datetime(2021, 1, 4, 0, 0)) == dt.date(2021, 1, 4)
