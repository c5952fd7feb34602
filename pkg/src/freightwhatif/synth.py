"""Deterministic synthetic market data and vessel fleets.

Everything draws from a seeded PCG64 generator, so any fixed seed
replays bit-identically. Ground-truth process parameters travel in
``frame.metadata``: each recovery test then carries its own oracle.
"""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientData
from .spatial import (
    EARTH_RADIUS_KM,
    CargoStatus,
    PortRegion,
    VesselRecord,
    bearing_deg,
    imo_check_digit,
)
from .timeseries import TimeSeriesFrame

DEFAULT_START = dt.date(2021, 1, 4)  # a Monday


def _weekly_index(start: dt.date, n: int) -> list[dt.date]:
    return [start + dt.timedelta(weeks=i) for i in range(n)]


@dataclass(frozen=True)
class ExogProcess:
    """One AR(1) exogenous driver and its true effect on the target."""

    name: str
    coefficient: float
    mean: float = 100.0
    sigma: float = 5.0
    rho: float = 0.8


@dataclass(frozen=True)
class LinearMarketConfig:
    seed: int
    n_weeks: int = 150
    exog: tuple[ExogProcess, ...] = (
        ExogProcess("brazil_loading", 0.001, mean=100_000.0, sigma=3_000.0),
        ExogProcess("ore_price", 0.05, mean=120.0, sigma=8.0),
    )
    intercept: float = 10.0
    noise_sigma: float = 0.5
    target: str = "freight_index"
    start: dt.date = DEFAULT_START


def gen_linear_market(cfg: LinearMarketConfig) -> TimeSeriesFrame:
    """target = intercept + sum(coef * exog) + Gaussian noise."""
    if cfg.n_weeks < len(cfg.exog) + 2:
        raise InsufficientData(
            f"n_weeks must be >= {len(cfg.exog) + 2} for {len(cfg.exog)} drivers")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = cfg.n_weeks
    columns = []
    for proc in cfg.exog:
        x = np.empty(n)
        x[0] = proc.mean + proc.sigma * rng.standard_normal()
        shocks = rng.standard_normal(n)
        for t in range(1, n):
            x[t] = proc.mean + proc.rho * (x[t - 1] - proc.mean) + proc.sigma * shocks[t]
        columns.append(x)
    target = np.full(n, cfg.intercept)
    for proc, x in zip(cfg.exog, columns):
        target = target + proc.coefficient * x
    target = target + cfg.noise_sigma * rng.standard_normal(n)
    values = np.column_stack([target] + columns)
    return TimeSeriesFrame(
        _weekly_index(cfg.start, n),
        [cfg.target] + [p.name for p in cfg.exog],
        values,
        metadata={
            "generator": "linear_market",
            "seed": cfg.seed,
            "intercept": cfg.intercept,
            "coefficients": {p.name: p.coefficient for p in cfg.exog},
            "noise_sigma": cfg.noise_sigma,
        },
    )


@dataclass(frozen=True)
class CointegratedConfig:
    """Bivariate error-correction system with a unit-normalized long run.

    The pair shares one random-walk trend; the deviation beta'y follows
    a stationary AR(1) whenever beta'alpha is in (-2, 0).
    """

    seed: int
    n_weeks: int = 2000
    beta: tuple[float, float] = (1.0, -1.0)
    alpha: tuple[float, float] = (-0.3, 0.2)
    sigma: float = 1.0
    variables: tuple[str, str] = ("freight_index", "peer_index")
    start: dt.date = DEFAULT_START


def gen_cointegrated(cfg: CointegratedConfig) -> TimeSeriesFrame:
    if cfg.n_weeks < 10:
        raise InsufficientData("n_weeks must be >= 10")
    if cfg.beta[0] != 1.0:
        raise ValueError("beta must be normalized with first entry 1")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    n = cfg.n_weeks
    alpha = np.array(cfg.alpha)
    beta = np.array(cfg.beta)
    y = np.zeros((n, 2))
    shocks = rng.normal(0.0, cfg.sigma, (n, 2))
    for t in range(1, n):
        y[t] = y[t - 1] + alpha * (beta @ y[t - 1]) + shocks[t]
    return TimeSeriesFrame(
        _weekly_index(cfg.start, n),
        list(cfg.variables),
        y,
        metadata={
            "generator": "cointegrated",
            "seed": cfg.seed,
            "beta": list(cfg.beta),
            "alpha": list(cfg.alpha),
            "sigma": cfg.sigma,
        },
    )


@dataclass(frozen=True)
class VesselFleetConfig:
    seed: int
    n_weeks: int = 8
    n_approaching_ballast: int = 3
    n_departing_ballast: int = 2
    n_laden_approaching: int = 2
    records_per_week: int = 3
    start_distance_km: float = 1500.0
    approach_km_per_week: float = 100.0
    start: dt.date = DEFAULT_START


def destination_point(origin: tuple[float, float], bearing: float,
                      distance_km: float) -> tuple[float, float]:
    """Point at a given initial bearing and great-circle distance."""
    lat1, lon1 = map(math.radians, origin)
    delta = distance_km / EARTH_RADIUS_KM
    theta = math.radians(bearing)
    lat2 = math.asin(math.sin(lat1) * math.cos(delta)
                     + math.cos(lat1) * math.sin(delta) * math.cos(theta))
    lon2 = lon1 + math.atan2(math.sin(theta) * math.sin(delta) * math.cos(lat1),
                             math.cos(delta) - math.sin(lat1) * math.sin(lat2))
    lon_deg = math.degrees(lon2)
    lon_deg = (lon_deg + 180.0) % 360.0 - 180.0
    if lon_deg == -180.0:
        lon_deg = 180.0
    return math.degrees(lat2), lon_deg


def _fresh_imos(rng: np.random.Generator, count: int) -> list[int]:
    bases = rng.choice(np.arange(100_000, 1_000_000), size=count, replace=False)
    return [int(b) * 10 + imo_check_digit(int(b)) for b in bases]


def gen_vessels(cfg: VesselFleetConfig, port: PortRegion) -> list[VesselRecord]:
    """Straight-line tracks toward or away from the port.

    Approaching tracks always stay outside the port radius so each week
    contributes exactly ``n_approaching_ballast`` to the supply count.
    """
    closest = cfg.start_distance_km - cfg.approach_km_per_week * (cfg.n_weeks - 1)
    if closest <= port.radius_km:
        raise ValueError("tracks would enter the port radius; shrink approach_km_per_week")
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    total = cfg.n_approaching_ballast + cfg.n_departing_ballast + cfg.n_laden_approaching
    imos = _fresh_imos(rng, total)
    rays = [(360.0 * i) / max(total, 1) + 7.0 for i in range(total)]
    statuses = ([CargoStatus.BALLAST] * cfg.n_approaching_ballast
                + [CargoStatus.BALLAST] * cfg.n_departing_ballast
                + [CargoStatus.LADEN] * cfg.n_laden_approaching)
    departing = [False] * cfg.n_approaching_ballast + [True] * cfg.n_departing_ballast \
        + [False] * cfg.n_laden_approaching

    records: list[VesselRecord] = []
    for week in range(cfg.n_weeks):
        monday = cfg.start + dt.timedelta(weeks=week)
        for v in range(total):
            distance = cfg.start_distance_km - cfg.approach_km_per_week * week
            pos = destination_point(port.center, rays[v], distance)
            to_port = bearing_deg(pos, port.center)
            heading = (to_port + 180.0) % 360.0 if departing[v] else to_port
            speed = float(rng.uniform(8.0, 14.0))
            for k in range(cfg.records_per_week):
                ts = dt.datetime.combine(monday, dt.time(0, 0)) + dt.timedelta(hours=6 * k)
                records.append(VesselRecord(
                    imo=imos[v],
                    timestamp=ts,
                    lat=pos[0],
                    lon=pos[1],
                    heading=heading,
                    speed_knots=speed,
                    cargo_status=statuses[v],
                ))
    return records
