"""Operator command line: generate data, fit, backtest, run what-ifs, serve.

Exit codes: 0 success, 1 data/model errors (single-line diagnostic on
stderr), 2 usage errors. All randomness flows through --seed flags.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys

from .config import parse_config
from .errors import FreightWhatifError
from .evaluation import walk_forward_backtest
from .models import (
    ArimaxParams,
    LstmParams,
    ModelKind,
    ModelSpec,
    VecmParams,
    fit_model,
    load_model_json,
    model_to_json,
)
from .scenario import HistoryStore, Scenario, run_whatif
from .spatial import (
    DEFAULT_APPROACH_TOLERANCE_DEG,
    PortRegion,
    aggregate_supply,
    load_vessel_csv,
    serialize_vessel_csv,
    vessels_in_view,
)
from .synth import (
    CointegratedConfig,
    LinearMarketConfig,
    VesselFleetConfig,
    gen_cointegrated,
    gen_linear_market,
    gen_vessels,
)
from .timeseries import load_frame, serialize_frame


def _read(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _load_frame_arg(path: str):
    return load_frame(_read(path))


def _spec_from_args(args: argparse.Namespace) -> ModelSpec:
    kind = ModelKind.from_string(args.model)
    exog = tuple(v for v in (args.exog or "").split(",") if v)
    if kind is ModelKind.MLR:
        params = None
    elif kind is ModelKind.ARIMAX:
        params = ArimaxParams(args.p, args.d, args.q)
    elif kind is ModelKind.VECM:
        params = VecmParams(args.lags)
    else:
        params = LstmParams(window=args.window, hidden_size=args.hidden,
                            epochs=args.epochs, learning_rate=args.lr, seed=args.seed)
    return ModelSpec(kind, args.target, exog, params)


def _add_spec_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=["mlr", "arimax", "vecm", "lstm"])
    p.add_argument("--target", required=True)
    p.add_argument("--exog", default="", help="comma-separated exogenous variables")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--q", type=int, default=1)
    p.add_argument("--lags", type=int, default=2)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--hidden", type=int, default=8)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)


def cmd_gen_data(args) -> int:
    if args.kind == "linear":
        frame = gen_linear_market(LinearMarketConfig(
            seed=args.seed, n_weeks=args.n_weeks, noise_sigma=args.noise_sigma))
        payload = serialize_frame(frame)
        meta = frame.metadata
    elif args.kind == "cointegrated":
        frame = gen_cointegrated(CointegratedConfig(seed=args.seed, n_weeks=args.n_weeks))
        payload = serialize_frame(frame)
        meta = frame.metadata
    else:
        port = PortRegion(args.port_name, (args.port_lat, args.port_lon), args.port_radius)
        records = gen_vessels(VesselFleetConfig(seed=args.seed, n_weeks=args.n_weeks), port)
        payload = serialize_vessel_csv(records)
        meta = {"generator": "vessels", "seed": args.seed, "n_records": len(records)}
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(payload)
    if args.meta_out:
        with open(args.meta_out, "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
    print(f"wrote {args.out}")
    return 0


def cmd_fit(args) -> int:
    frame = _load_frame_arg(args.data)
    model = fit_model(frame, _spec_from_args(args))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))
    print(f"wrote {args.out}")
    return 0


def cmd_backtest(args) -> int:
    frame = _load_frame_arg(args.data)
    card = walk_forward_backtest(_spec_from_args(args), frame,
                                 n_folds=args.folds, horizon=args.horizon)
    if args.json:
        print(json.dumps(card.to_doc()))
    else:
        print(f"{'model':<8} {'rmse':>10} {'mae':>10} {'mape%':>10} {'folds':>6}")
        mape = "n/a" if card.mape != card.mape else f"{card.mape:.3f}"
        print(f"{card.model_kind.value:<8} {card.rmse:>10.3f} {card.mae:>10.3f} "
              f"{mape:>10} {card.n_folds:>6}")
    return 0


def cmd_whatif(args) -> int:
    frame = _load_frame_arg(args.data)
    models = {}
    for path in args.model_file:
        model = load_model_json(_read(path).decode("utf-8"))
        models[model.kind] = model
    with open(args.scenario, encoding="utf-8") as fh:
        scenario = Scenario.from_doc(json.load(fh))
    history = HistoryStore(args.history) if args.history else None
    run = run_whatif(models, frame, scenario, history=history)
    if args.json:
        print(json.dumps(run.to_doc()))
    else:
        print(f"run {run.run_id} route {scenario.route_id} horizon {scenario.horizon}")
        for kind, mean in run.mean_diff_per_model.items():
            print(f"  {kind.value:<8} mean diff {mean:+.4f}")
        print(f"  overall mean diff {run.overall_mean_diff:+.4f}")
    return 0


def cmd_vessels(args) -> int:
    records = load_vessel_csv(_read(args.file))
    port = PortRegion(args.port_name, (args.port_lat, args.port_lon), args.port_radius)
    when = dt.datetime.fromisoformat(args.at) if args.at else \
        max((r.timestamp for r in records), default=dt.datetime.now())
    box = tuple(float(x) for x in args.bbox.split(",")) if args.bbox \
        else (-90.0, -180.0, 90.0, 180.0)
    visible = vessels_in_view(records, box, when)
    if args.status != "all":
        visible = [v for v in visible if v.cargo_status.value == args.status]
    supply = aggregate_supply(records, port, args.tolerance)
    if args.json:
        print(json.dumps({
            "vessels": [{"imo": v.imo, "timestamp": v.timestamp.isoformat(),
                         "lat": v.lat, "lon": v.lon, "heading": v.heading,
                         "speed_knots": v.speed_knots,
                         "cargo_status": v.cargo_status.value} for v in visible],
            "supply": supply.to_json_dict(),
        }))
    else:
        print(f"{len(visible)} vessels in view at {when.isoformat()}")
        for v in visible:
            print(f"  {v.imo} {v.cargo_status.value:<7} ({v.lat:.3f},{v.lon:.3f}) "
                  f"hdg {v.heading:.0f}")
        for week, row in zip(supply.index, supply.values):
            print(f"  week {week}: {int(row[0])} ballast approaching")
    return 0


def cmd_validate(args) -> int:
    try:
        if args.kind == "frame":
            _load_frame_arg(args.file)
        elif args.kind == "vessels":
            load_vessel_csv(_read(args.file))
        elif args.kind == "scenario":
            with open(args.file, encoding="utf-8") as fh:
                Scenario.from_doc(json.load(fh))
        else:
            load_model_json(_read(args.file).decode("utf-8"))
    except (FreightWhatifError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invalid {args.kind}: {exc}", file=sys.stderr)
        return 1
    print(f"{args.file}: valid {args.kind}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(parse_config(args.config), ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freightwhatif",
        description="What-if scenario engine for freight-rate forecasting")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="write deterministic synthetic data")
    g.add_argument("kind", choices=["linear", "cointegrated", "vessels"])
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--n-weeks", type=int, default=150)
    g.add_argument("--noise-sigma", type=float, default=0.5)
    g.add_argument("--port-name", default="Tubarao")
    g.add_argument("--port-lat", type=float, default=-20.28)
    g.add_argument("--port-lon", type=float, default=-40.24)
    g.add_argument("--port-radius", type=float, default=50.0)
    g.add_argument("--out", required=True)
    g.add_argument("--meta-out")
    g.set_defaults(func=cmd_gen_data)

    f = sub.add_parser("fit", help="fit one model and write its JSON document")
    f.add_argument("--data", required=True)
    _add_spec_flags(f)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_fit)

    b = sub.add_parser("backtest", help="walk-forward backtest one model")
    b.add_argument("--data", required=True)
    _add_spec_flags(b)
    b.add_argument("--folds", type=int, default=4)
    b.add_argument("--horizon", type=int, default=1)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_backtest)

    w = sub.add_parser("whatif", help="run a scenario headless")
    w.add_argument("--data", required=True)
    w.add_argument("--model-file", action="append", required=True)
    w.add_argument("--scenario", required=True)
    w.add_argument("--history", help="append the run to this ndjson log")
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_whatif)

    v = sub.add_parser("vessels", help="query vessel positions and supply counts")
    v.add_argument("--file", required=True)
    v.add_argument("--port-name", default="Tubarao")
    v.add_argument("--port-lat", type=float, default=-20.28)
    v.add_argument("--port-lon", type=float, default=-40.24)
    v.add_argument("--port-radius", type=float, default=50.0)
    v.add_argument("--tolerance", type=float, default=DEFAULT_APPROACH_TOLERANCE_DEG)
    v.add_argument("--bbox")
    v.add_argument("--at")
    v.add_argument("--status", choices=["all", "ballast", "laden"], default="all")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_vessels)

    val = sub.add_parser("validate", help="check a data file, exit nonzero if invalid")
    val.add_argument("--kind", choices=["frame", "vessels", "scenario", "model"],
                     required=True)
    val.add_argument("--file", required=True)
    val.set_defaults(func=cmd_validate)

    s = sub.add_parser("serve", help="start the HTTP service")
    s.add_argument("--config", required=True)
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--ui", help="directory with the built web interface to serve at /")
    s.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FreightWhatifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
