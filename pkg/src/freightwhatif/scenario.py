"""The what-if core: future paths, baseline/scenario runs, run history.

Default future paths carry each variable's last observed value across
the horizon. A perturbation overwrites its step and carries forward to
later steps until the next explicit perturbation of the same variable
(drag-then-hold): the UI submits sparse dragged points and a one-week
spike is almost never what the analyst meant.

The baseline is recomputed on every run with the identical code path
and empty perturbations, which makes the zero-perturbation identity
structural rather than numerical.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import os
import threading
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptySeries, InvalidScenario, ModelNotFitted, ModelNotInRun
from .models import Forecast, FittedModel, ModelKind, forecast_model
from .timeseries import TimeSeriesFrame, last_observed

ALL_KINDS = (ModelKind.MLR, ModelKind.ARIMAX, ModelKind.VECM, ModelKind.LSTM)


@dataclass(frozen=True)
class Scenario:
    route_id: str
    horizon: int
    forward_window: int = 1
    perturbations: dict[str, tuple[tuple[int, float], ...]] = field(default_factory=dict)
    model_selection: tuple[ModelKind, ...] = ALL_KINDS

    def __post_init__(self):
        if self.horizon < 1:
            raise InvalidScenario("horizon must be >= 1", field="horizon")
        if self.forward_window < 1:
            raise InvalidScenario("forward_window must be >= 1", field="forward_window")
        if not self.model_selection:
            raise InvalidScenario("model_selection must not be empty", field="model_selection")
        if len(set(self.model_selection)) != len(self.model_selection):
            raise InvalidScenario("duplicate model in selection", field="model_selection")
        normalized = {}
        for name, points in self.perturbations.items():
            pts = tuple((int(s), float(v)) for s, v in points)
            steps = [s for s, _ in pts]
            if len(set(steps)) != len(steps):
                raise InvalidScenario(f"duplicate perturbation step for {name!r}",
                                      field=f"perturbations.{name}")
            for s, v in pts:
                if not 0 <= s < self.horizon:
                    raise InvalidScenario(
                        f"perturbation step {s} outside horizon {self.horizon}",
                        field=f"perturbations.{name}")
                if not math.isfinite(v):
                    raise InvalidScenario(f"non-finite perturbation value for {name!r}",
                                          field=f"perturbations.{name}")
            normalized[name] = pts
        object.__setattr__(self, "perturbations", normalized)
        object.__setattr__(self, "model_selection", tuple(self.model_selection))

    def validate_against(self, frame: TimeSeriesFrame, target: str) -> None:
        for name in self.perturbations:
            if name == target:
                raise InvalidScenario(f"cannot perturb the target variable {name!r}",
                                      field=f"perturbations.{name}")
            if not frame.has_variable(name):
                raise InvalidScenario(f"unknown variable {name!r}",
                                      field=f"perturbations.{name}")

    def to_doc(self) -> dict:
        return {
            "route_id": self.route_id,
            "horizon": self.horizon,
            "forward_window": self.forward_window,
            "perturbations": {
                name: [[s, v] for s, v in points]
                for name, points in sorted(self.perturbations.items())
            },
            "model_selection": [k.value for k in self.model_selection],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Scenario":
        if not isinstance(doc, dict):
            raise InvalidScenario("scenario body must be an object", field="")
        for key in ("route_id", "horizon"):
            if key not in doc:
                raise InvalidScenario(f"missing field {key!r}", field=key)
        perts_doc = doc.get("perturbations", {})
        if not isinstance(perts_doc, dict):
            raise InvalidScenario("perturbations must be an object", field="perturbations")
        perturbations = {}
        for name, points in perts_doc.items():
            try:
                perturbations[name] = tuple((int(s), float(v)) for s, v in points)
            except (TypeError, ValueError):
                raise InvalidScenario(f"malformed perturbation list for {name!r}",
                                      field=f"perturbations.{name}") from None
        selection_doc = doc.get("model_selection")
        if selection_doc is None:
            selection = ALL_KINDS
        else:
            try:
                selection = tuple(ModelKind.from_string(s) for s in selection_doc)
            except ValueError as exc:
                raise InvalidScenario(str(exc), field="model_selection") from None
        try:
            horizon = int(doc["horizon"])
            forward_window = int(doc.get("forward_window", 1))
        except (TypeError, ValueError):
            raise InvalidScenario("horizon and forward_window must be integers",
                                  field="horizon") from None
        return cls(
            route_id=str(doc["route_id"]),
            horizon=horizon,
            forward_window=forward_window,
            perturbations=perturbations,
            model_selection=selection,
        )


@dataclass(frozen=True)
class ScenarioRun:
    run_id: int
    created_at: str
    scenario: Scenario
    baseline: dict[ModelKind, Forecast]
    whatif: dict[ModelKind, Forecast]
    diff: dict[ModelKind, np.ndarray]
    mean_diff_per_model: dict[ModelKind, float]
    overall_mean_diff: float

    def to_doc(self) -> dict:
        kinds = [k for k in ALL_KINDS if k in self.baseline]
        return {
            "run_id": self.run_id,
            "created_at": self.created_at,
            "scenario": self.scenario.to_doc(),
            "baseline": {k.value: self.baseline[k].to_doc() for k in kinds},
            "whatif": {k.value: self.whatif[k].to_doc() for k in kinds},
            "diff": {k.value: [float(v) for v in self.diff[k]] for k in kinds},
            "mean_diff_per_model": {k.value: float(self.mean_diff_per_model[k]) for k in kinds},
            "overall_mean_diff": float(self.overall_mean_diff),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ScenarioRun":
        baseline = {ModelKind.from_string(k): Forecast.from_doc(v)
                    for k, v in doc["baseline"].items()}
        whatif = {ModelKind.from_string(k): Forecast.from_doc(v)
                  for k, v in doc["whatif"].items()}
        diff = {ModelKind.from_string(k): np.array(v, dtype=float)
                for k, v in doc["diff"].items()}
        means = {ModelKind.from_string(k): float(v)
                 for k, v in doc["mean_diff_per_model"].items()}
        return cls(
            run_id=int(doc["run_id"]),
            created_at=doc["created_at"],
            scenario=Scenario.from_doc(doc["scenario"]),
            baseline=baseline,
            whatif=whatif,
            diff=diff,
            mean_diff_per_model=means,
            overall_mean_diff=float(doc["overall_mean_diff"]),
        )


class HistoryStore:
    """Append-only run log, optionally persisted as newline-delimited JSON.

    Appends are serialized by a lock and ids are assigned inside it, so
    concurrent writers get distinct consecutive ids. Existing entries
    are never rewritten; the ndjson file is replayed verbatim on load.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self._path = os.fspath(path) if path is not None else None
        self._lock = threading.Lock()
        self._runs: list[ScenarioRun] = []
        if self._path and os.path.exists(self._path):
            with open(self._path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._runs.append(ScenarioRun.from_doc(json.loads(line)))

    def __len__(self) -> int:
        return len(self._runs)

    def next_id(self) -> int:
        return len(self._runs) + 1

    def append_with_id(self, build) -> ScenarioRun:
        """Allocate the next id and append atomically.

        ``build(run_id)`` must return the finished ScenarioRun; it runs
        inside the lock, which is the single serialization point.
        """
        with self._lock:
            run = build(len(self._runs) + 1)
            if self._path:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(run.to_doc()) + "\n")
            self._runs.append(run)
            return run

    def runs(self, route_id: str | None = None) -> list[ScenarioRun]:
        snapshot = list(self._runs)
        if route_id is None:
            return snapshot
        return [r for r in snapshot if r.scenario.route_id == route_id]


def build_exog_paths(frame: TimeSeriesFrame, scenario: Scenario,
                     exog_vars: list[str] | tuple[str, ...]) -> dict[str, np.ndarray]:
    """Default carry-forward paths with drag-then-hold perturbations."""
    h = scenario.horizon
    paths: dict[str, np.ndarray] = {}
    for name in exog_vars:
        try:
            last = last_observed(frame, name)
        except EmptySeries:
            raise EmptySeries(f"variable {name!r} has no observed history") from None
        path = np.full(h, last)
        for step, value in sorted(scenario.perturbations.get(name, ())):
            path[step:] = value
        paths[name] = path
    return paths


def run_whatif(models: dict[ModelKind, FittedModel], frame: TimeSeriesFrame,
               scenario: Scenario, history: HistoryStore | None = None,
               now: dt.datetime | None = None) -> ScenarioRun:
    """Baseline + what-if forecasts for every selected model, plus diffs."""
    selected = [k for k in ALL_KINDS if k in scenario.model_selection]
    for kind in selected:
        if kind not in models:
            raise ModelNotFitted(kind)
    targets = {models[k].spec.target for k in selected}
    if len(targets) != 1:
        raise InvalidScenario(f"selected models disagree on the target: {sorted(targets)}",
                              field="model_selection")
    scenario.validate_against(frame, targets.pop())

    baseline_scenario = replace(scenario, perturbations={})
    baseline: dict[ModelKind, Forecast] = {}
    whatif: dict[ModelKind, Forecast] = {}
    diff: dict[ModelKind, np.ndarray] = {}
    means: dict[ModelKind, float] = {}
    for kind in selected:
        model = models[kind]
        base_paths = build_exog_paths(frame, baseline_scenario, model.spec.exogenous)
        what_paths = build_exog_paths(frame, scenario, model.spec.exogenous)
        baseline[kind] = forecast_model(model, base_paths, scenario.horizon)
        whatif[kind] = forecast_model(model, what_paths, scenario.horizon)
        diff[kind] = whatif[kind].values - baseline[kind].values
        means[kind] = float(diff[kind].mean())
    overall = float(np.mean([means[k] for k in selected]))
    stamp = (now or dt.datetime.now(dt.timezone.utc)).isoformat()

    def build(run_id: int) -> ScenarioRun:
        return ScenarioRun(
            run_id=run_id,
            created_at=stamp,
            scenario=scenario,
            baseline=baseline,
            whatif=whatif,
            diff=diff,
            mean_diff_per_model=means,
            overall_mean_diff=overall,
        )

    if history is not None:
        return history.append_with_id(build)
    return build(1)


def history_list(store: HistoryStore, route_id: str | None = None) -> list[ScenarioRun]:
    """Runs in append (run_id) order, optionally filtered by route."""
    return store.runs(route_id)


def diff_curve(run: ScenarioRun, kind: ModelKind) -> np.ndarray:
    """One model's what-if minus baseline curve; sign shows the trend shift."""
    if kind not in run.diff:
        raise ModelNotInRun(kind)
    return run.diff[kind]
