"""JSON HTTP service over routes, models, scenarios, history and vessels.

Models are fitted once at startup from the route configuration and held
immutable; every request handler is synchronous and side-effect free
except POST /routes/{id}/whatif, whose history append is the single
linearization point. Baseline prediction is the degenerate what-if (an
empty perturbation set), so baseline and scenario forecasts always
share one code path.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import RouteConfig, ServiceConfig, parse_config
from .errors import (
    ConfigError,
    FreightWhatifError,
    InvalidBBox,
    InvalidScenario,
    ModelNotFitted,
)
from .evaluation import ModelScorecard, rank_models, walk_forward_backtest
from .models import (
    FittedARIMAX,
    FittedMLR,
    FittedModel,
    ModelKind,
    coefficient_impacts,
    fit_model,
)
from .scenario import ALL_KINDS, HistoryStore, Scenario, run_whatif
from .spatial import CargoStatus, VesselRecord, load_vessel_csv, vessels_in_view, aggregate_supply
from .timeseries import TimeSeriesFrame, load_frame

NEAR_TERM_WEEKS = 4


# --- response schemas (published contract; every 200 body validates) --------

class DataSpanDoc(BaseModel):
    start: str
    end: str
    weeks: int


class RouteSummaryDoc(BaseModel):
    route_id: str
    target: str
    variables: list[str]
    exogenous: list[str]
    fitted_models: list[str]
    data_span: DataSpanDoc


class FrameDoc(BaseModel):
    index: list[str]
    variables: list[str]
    values: list[list[float | None]]


class ScorecardDoc(BaseModel):
    model_kind: str
    rmse: float
    mae: float
    mape: float | None
    n_folds: int
    per_fold_errors: list[float]


class ModelsResponse(BaseModel):
    metric: str
    scorecards: list[ScorecardDoc]
    ranking: list[str]


class ImpactDoc(BaseModel):
    variable: str
    mean_impact: float | None
    std_impact: float | None
    available: bool


class CoefficientsResponse(BaseModel):
    model_kind: str
    impacts: list[ImpactDoc]


class ForecastDoc(BaseModel):
    model_kind: str
    horizon: int
    values: list[float]
    origin: str


class ScenarioDoc(BaseModel):
    route_id: str
    horizon: int
    forward_window: int
    perturbations: dict[str, list[list[float]]]
    model_selection: list[str]


class ScenarioRunDoc(BaseModel):
    run_id: int
    created_at: str
    scenario: ScenarioDoc
    baseline: dict[str, ForecastDoc]
    whatif: dict[str, ForecastDoc]
    diff: dict[str, list[float]]
    mean_diff_per_model: dict[str, float]
    overall_mean_diff: float


class VesselDoc(BaseModel):
    imo: int
    timestamp: str
    lat: float
    lon: float
    heading: float
    speed_knots: float
    cargo_status: str


class VesselsResponse(BaseModel):
    vessels: list[VesselDoc]
    supply: FrameDoc


@dataclass
class RouteState:
    config: RouteConfig
    frame: TimeSeriesFrame
    models: dict[ModelKind, FittedModel]
    scorecards: list[ModelScorecard]
    vessels: list[VesselRecord]


def _frame_doc(frame: TimeSeriesFrame) -> dict:
    return frame.to_json_dict()


def build_route_state(route: RouteConfig) -> RouteState:
    """Load data, fit every configured model, backtest for the scorecards.

    Any failure is a startup failure: the service refuses to run with a
    partially initialized route.
    """
    try:
        with open(route.data_path, "rb") as fh:
            frame = load_frame(fh)
    except FreightWhatifError as exc:
        raise ConfigError(f"route {route.route_id}: cannot load data: {exc}") from None
    for name in (route.target, *route.exogenous):
        if not frame.has_variable(name):
            raise ConfigError(f"route {route.route_id}: variable {name!r} not in data")
    models: dict[ModelKind, FittedModel] = {}
    cards: list[ModelScorecard] = []
    for spec in route.model_specs:
        try:
            models[spec.kind] = fit_model(frame, spec)
            cards.append(walk_forward_backtest(spec, frame, route.backtest_folds,
                                               route.backtest_horizon))
        except FreightWhatifError as exc:
            raise ConfigError(
                f"route {route.route_id}: cannot fit {spec.kind.value}: {exc}") from None
    vessels: list[VesselRecord] = []
    if route.vessel_path is not None:
        try:
            with open(route.vessel_path, "rb") as fh:
                vessels = load_vessel_csv(fh)
        except FreightWhatifError as exc:
            raise ConfigError(f"route {route.route_id}: cannot load vessels: {exc}") from None
    return RouteState(config=route, frame=frame, models=models,
                      scorecards=cards, vessels=vessels)


def create_app(config: ServiceConfig | str, ui_dir: str | None = None) -> FastAPI:
    if not isinstance(config, ServiceConfig):
        config = parse_config(config)
    states = {route.route_id: build_route_state(route) for route in config.routes}
    config.data_dir.mkdir(parents=True, exist_ok=True)
    history = HistoryStore(config.history_path)

    app = FastAPI(title="freightwhatif", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    def _validation_handler(request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ()))
        return JSONResponse(status_code=400,
                            content={"detail": first.get("msg", "invalid request"),
                                     "field": field})

    def get_state(route_id: str) -> RouteState:
        state = states.get(route_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown route {route_id!r}")
        return state

    @app.get("/routes", response_model=list[RouteSummaryDoc])
    def list_routes():
        out = []
        for route_id in sorted(states):
            st = states[route_id]
            out.append(RouteSummaryDoc(
                route_id=route_id,
                target=st.config.target,
                variables=list(st.frame.variables),
                exogenous=list(st.config.exogenous),
                fitted_models=[k.value for k in ALL_KINDS if k in st.models],
                data_span=DataSpanDoc(start=st.frame.index[0].isoformat(),
                                      end=st.frame.index[-1].isoformat(),
                                      weeks=len(st.frame)),
            ))
        return out

    @app.get("/routes/{route_id}/series", response_model=FrameDoc)
    def get_series(route_id: str, window: str = Query("all")):
        st = get_state(route_id)
        if window == "all":
            return _frame_doc(st.frame)
        if window == "near":
            return _frame_doc(st.frame.tail(min(NEAR_TERM_WEEKS, len(st.frame))))
        raise HTTPException(status_code=400, detail="window must be 'all' or 'near'")

    @app.get("/routes/{route_id}/models", response_model=ModelsResponse)
    def get_models(route_id: str, metric: str = Query("rmse")):
        st = get_state(route_id)
        if metric not in ("rmse", "mae", "mape"):
            raise HTTPException(status_code=400, detail="metric must be rmse, mae or mape")
        if not st.scorecards:
            return ModelsResponse(metric=metric, scorecards=[], ranking=[])
        ranked = rank_models(st.scorecards, metric)
        return ModelsResponse(
            metric=metric,
            scorecards=[ScorecardDoc(**c.to_doc()) for c in ranked],
            ranking=[c.model_kind.value for c in ranked],
        )

    @app.get("/routes/{route_id}/coefficients", response_model=CoefficientsResponse)
    def get_coefficients(route_id: str, model: str | None = Query(None)):
        st = get_state(route_id)
        if not st.models:
            raise HTTPException(status_code=404, detail="no fitted models on this route")
        if model is not None:
            try:
                kind = ModelKind.from_string(model)
            except ValueError:
                raise HTTPException(status_code=400,
                                    detail="model must be mlr, arimax, vecm or lstm") from None
            if kind not in st.models:
                raise HTTPException(status_code=404,
                                    detail=f"model {kind.value} not fitted on this route")
        else:
            # prefer a family with scalar coefficients for the default view
            kind = next((k for k in ALL_KINDS
                         if k in st.models
                         and isinstance(st.models[k], (FittedMLR, FittedARIMAX))),
                        next(k for k in ALL_KINDS if k in st.models))
        impacts = coefficient_impacts(st.models[kind], st.frame)
        return CoefficientsResponse(model_kind=kind.value,
                                    impacts=[ImpactDoc(**s.to_doc()) for s in impacts])

    @app.post("/routes/{route_id}/whatif", response_model=ScenarioRunDoc)
    def post_whatif(route_id: str, body: dict = Body(...)):
        st = get_state(route_id)
        doc = dict(body)
        doc.setdefault("route_id", route_id)
        if doc["route_id"] != route_id:
            raise InvalidScenario(
                f"body route_id {doc['route_id']!r} does not match the URL", field="route_id")
        if "model_selection" not in doc or doc["model_selection"] is None:
            doc["model_selection"] = [k.value for k in ALL_KINDS if k in st.models]
        scenario = Scenario.from_doc(doc)
        run = run_whatif(st.models, st.frame, scenario, history=history)
        return run.to_doc()

    @app.get("/routes/{route_id}/history", response_model=list[ScenarioRunDoc])
    def get_history(route_id: str):
        get_state(route_id)
        return [run.to_doc() for run in history.runs(route_id)]

    @app.get("/vessels", response_model=VesselsResponse)
    def get_vessels(route: str = Query(...),
                    bbox: str | None = Query(None),
                    status: str = Query("all"),
                    at: str | None = Query(None)):
        st = get_state(route)
        if status not in ("all", "ballast", "laden"):
            raise HTTPException(status_code=400,
                                detail="status must be all, ballast or laden")
        records = st.vessels
        if at is not None:
            try:
                when = dt.datetime.fromisoformat(at)
            except ValueError:
                raise HTTPException(status_code=400,
                                    detail="at must be an ISO-8601 timestamp") from None
        else:
            when = max((r.timestamp for r in records), default=dt.datetime.now())
        box = (-90.0, -180.0, 90.0, 180.0)
        if bbox is not None:
            parts = bbox.split(",")
            if len(parts) != 4:
                raise HTTPException(status_code=400,
                                    detail="bbox must be lat_min,lon_min,lat_max,lon_max")
            try:
                box = tuple(float(p) for p in parts)
            except ValueError:
                raise HTTPException(status_code=400, detail="bbox values must be numbers") from None
        visible = vessels_in_view(records, box, when)
        if status != "all":
            wanted = CargoStatus(status)
            visible = [v for v in visible if v.cargo_status is wanted]
        if st.config.port is not None and records:
            supply = aggregate_supply(records, st.config.port,
                                      st.config.approach_tolerance_deg)
        else:
            supply = TimeSeriesFrame([], ["ballast_approaching"], np.zeros((0, 1)))
        return VesselsResponse(
            vessels=[VesselDoc(imo=v.imo, timestamp=v.timestamp.isoformat(), lat=v.lat,
                               lon=v.lon, heading=v.heading, speed_knots=v.speed_knots,
                               cargo_status=v.cargo_status.value) for v in visible],
            supply=FrameDoc(**_frame_doc(supply)),
        )

    @app.exception_handler(InvalidScenario)
    def _scenario_handler(request, exc: InvalidScenario):
        return JSONResponse(status_code=400, content={"detail": str(exc), "field": exc.field})

    @app.exception_handler(ModelNotFitted)
    def _not_fitted_handler(request, exc: ModelNotFitted):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(InvalidBBox)
    def _bbox_handler(request, exc: InvalidBBox):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(FreightWhatifError)
    def _domain_handler(request, exc: FreightWhatifError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    if ui_dir is not None:
        # mounted last so the API routes above keep precedence
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
