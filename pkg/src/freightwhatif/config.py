"""Service configuration: plain-text key-value file, one section per route.

Example::

    [server]
    data_dir = .

    [route:C3]
    data = c3.csv
    vessels = vessels.csv
    target = freight_index
    exogenous = brazil_loading, ore_price
    models = mlr, arimax, vecm, lstm
    lstm_epochs = 120
    port_name = Tubarao
    port_lat = -20.28
    port_lon = -40.24
    port_radius_km = 50

Relative file paths resolve against the config file's directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .models import ArimaxParams, LstmParams, ModelKind, ModelSpec, VecmParams
from .spatial import DEFAULT_APPROACH_TOLERANCE_DEG, PortRegion


@dataclass(frozen=True)
class RouteConfig:
    route_id: str
    data_path: Path
    target: str
    exogenous: tuple[str, ...]
    model_specs: tuple[ModelSpec, ...]
    vessel_path: Path | None = None
    port: PortRegion | None = None
    approach_tolerance_deg: float = DEFAULT_APPROACH_TOLERANCE_DEG
    backtest_folds: int = 4
    backtest_horizon: int = 1


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path
    routes: tuple[RouteConfig, ...] = field(default_factory=tuple)

    @property
    def history_path(self) -> Path:
        return self.data_dir / "history.ndjson"


def _split_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _build_spec(kind: ModelKind, target: str, exog: tuple[str, ...],
                section: configparser.SectionProxy) -> ModelSpec:
    if kind is ModelKind.MLR:
        return ModelSpec(kind, target, exog)
    if kind is ModelKind.ARIMAX:
        params = ArimaxParams(
            p=section.getint("arimax_p", 1),
            d=section.getint("arimax_d", 1),
            q=section.getint("arimax_q", 1),
        )
        return ModelSpec(kind, target, exog, params)
    if kind is ModelKind.VECM:
        return ModelSpec(kind, target, exog, VecmParams(section.getint("vecm_lags", 2)))
    params = LstmParams(
        window=section.getint("lstm_window", 4),
        hidden_size=section.getint("lstm_hidden", 8),
        epochs=section.getint("lstm_epochs", 150),
        learning_rate=section.getfloat("lstm_lr", 0.05),
        seed=section.getint("lstm_seed", 0),
    )
    return ModelSpec(kind, target, exog, params)


def parse_config(path: str | os.PathLike) -> ServiceConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    parser = configparser.ConfigParser()
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None

    base = path.parent
    data_dir = base
    if parser.has_section("server"):
        data_dir = base / parser.get("server", "data_dir", fallback=".")

    routes = []
    for name in parser.sections():
        if not name.startswith("route:"):
            continue
        route_id = name.split(":", 1)[1].strip()
        if not route_id:
            raise ConfigError(f"section [{name}] has an empty route id")
        section = parser[name]
        for key in ("data", "target"):
            if key not in section:
                raise ConfigError(f"route {route_id}: missing required key {key!r}")
        data_path = base / section["data"]
        if not data_path.exists():
            raise ConfigError(f"route {route_id}: data file {data_path} does not exist")
        target = section["target"].strip()
        exog = tuple(_split_list(section.get("exogenous", "")))
        try:
            kinds = [ModelKind.from_string(k) for k in _split_list(section.get("models", ""))]
        except ValueError as exc:
            raise ConfigError(f"route {route_id}: {exc}") from None
        try:
            specs = tuple(_build_spec(k, target, exog, section) for k in kinds)
        except ValueError as exc:
            raise ConfigError(f"route {route_id}: {exc}") from None

        vessel_path = None
        if section.get("vessels"):
            vessel_path = base / section["vessels"]
            if not vessel_path.exists():
                raise ConfigError(f"route {route_id}: vessel file {vessel_path} does not exist")

        port = None
        if section.get("port_name"):
            try:
                port = PortRegion(
                    name=section["port_name"].strip(),
                    center=(section.getfloat("port_lat"), section.getfloat("port_lon")),
                    radius_km=section.getfloat("port_radius_km", 50.0),
                )
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"route {route_id}: bad port definition: {exc}") from None

        routes.append(RouteConfig(
            route_id=route_id,
            data_path=data_path,
            target=target,
            exogenous=exog,
            model_specs=specs,
            vessel_path=vessel_path,
            port=port,
            approach_tolerance_deg=section.getfloat(
                "approach_tolerance_deg", DEFAULT_APPROACH_TOLERANCE_DEG),
            backtest_folds=section.getint("backtest_folds", 4),
            backtest_horizon=section.getint("backtest_horizon", 1),
        ))

    seen = set()
    for route in routes:
        if route.route_id in seen:
            raise ConfigError(f"duplicate route id {route.route_id!r}")
        seen.add(route.route_id)
    return ServiceConfig(data_dir=data_dir, routes=tuple(routes))
