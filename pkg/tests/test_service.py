import json
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from freightwhatif.config import parse_config
from freightwhatif.errors import ConfigError
from freightwhatif.service import create_app
from freightwhatif.spatial import PortRegion
from freightwhatif.synth import (
    LinearMarketConfig,
    VesselFleetConfig,
    gen_linear_market,
    gen_vessels,
)
from freightwhatif.timeseries import serialize_frame
from freightwhatif.spatial import serialize_vessel_csv

PORT = PortRegion("Tubarao", center=(-20.28, -40.24), radius_km=50.0)

CONFIG_TEMPLATE = """
[server]
data_dir = {data_dir}

[route:C3]
data = c3.csv
vessels = vessels.csv
target = freight_index
exogenous = brazil_loading, ore_price
models = mlr, arimax, lstm
arimax_p = 1
arimax_d = 0
arimax_q = 0
lstm_window = 4
lstm_hidden = 4
lstm_epochs = 10
lstm_seed = 0
backtest_folds = 3
port_name = Tubarao
port_lat = -20.28
port_lon = -40.24
port_radius_km = 50
"""


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("svc")
    frame = gen_linear_market(LinearMarketConfig(seed=42, n_weeks=90, noise_sigma=0.2))
    (root / "c3.csv").write_text(serialize_frame(frame))
    vessels = gen_vessels(VesselFleetConfig(seed=4, n_weeks=4), PORT)
    (root / "vessels.csv").write_text(serialize_vessel_csv(vessels))
    (root / "service.ini").write_text(CONFIG_TEMPLATE.format(data_dir="."))
    return root


@pytest.fixture()
def client(workdir):
    history = workdir / "history.ndjson"
    if history.exists():
        history.unlink()
    app = create_app(parse_config(workdir / "service.ini"))
    with TestClient(app) as c:
        yield c


class TestRoutes:
    def test_route_listing(self, client):
        body = client.get("/routes").json()
        assert [r["route_id"] for r in body] == ["C3"]
        assert body[0]["target"] == "freight_index"
        assert body[0]["data_span"]["weeks"] == 90
        assert body[0]["fitted_models"] == ["mlr", "arimax", "lstm"]

    def test_unknown_route_404(self, client):
        assert client.get("/routes/XX/series").status_code == 404

    def test_series_windows(self, client):
        full = client.get("/routes/C3/series", params={"window": "all"}).json()
        near = client.get("/routes/C3/series", params={"window": "near"}).json()
        assert len(full["values"]) == 90
        assert len(near["values"]) == 4
        assert near["index"] == full["index"][-4:]

    def test_bad_window_400(self, client):
        assert client.get("/routes/C3/series", params={"window": "x"}).status_code == 400


class TestModels:
    def test_scorecards_sorted(self, client):
        body = client.get("/routes/C3/models").json()
        assert body["metric"] == "rmse"
        rmses = [c["rmse"] for c in body["scorecards"]]
        assert rmses == sorted(rmses)
        assert body["ranking"] == [c["model_kind"] for c in body["scorecards"]]

    def test_mape_metric_reorders(self, client):
        body = client.get("/routes/C3/models", params={"metric": "mape"}).json()
        mapes = [c["mape"] for c in body["scorecards"] if c["mape"] is not None]
        assert mapes == sorted(mapes)

    def test_bad_metric_400(self, client):
        assert client.get("/routes/C3/models", params={"metric": "x"}).status_code == 400


class TestCoefficients:
    def test_default_prefers_scalar_family(self, client):
        body = client.get("/routes/C3/coefficients").json()
        assert body["model_kind"] == "mlr"
        assert all(i["available"] for i in body["impacts"])

    def test_lstm_impacts_unavailable(self, client):
        body = client.get("/routes/C3/coefficients", params={"model": "lstm"}).json()
        assert body["impacts"] and all(not i["available"] for i in body["impacts"])

    def test_unfitted_model_404(self, client):
        assert client.get("/routes/C3/coefficients",
                          params={"model": "vecm"}).status_code == 404


class TestWhatif:
    def test_empty_perturbations_zero_diff(self, client):
        body = client.post("/routes/C3/whatif", json={"horizon": 4}).json()
        assert body["overall_mean_diff"] == 0.0
        for diff in body["diff"].values():
            assert diff == [0.0, 0.0, 0.0, 0.0]

    def test_target_perturbation_400_with_field(self, client):
        r = client.post("/routes/C3/whatif", json={
            "horizon": 3, "perturbations": {"freight_index": [[0, 1.0]]}})
        assert r.status_code == 400
        assert r.json()["field"] == "perturbations.freight_index"

    def test_loading_drop_gives_negative_diff(self, client):
        series = client.get("/routes/C3/series").json()
        col = series["variables"].index("brazil_loading")
        last = series["values"][-1][col]
        r = client.post("/routes/C3/whatif", json={
            "horizon": 4,
            "perturbations": {"brazil_loading": [[0, last - 2000.0]]},
            "model_selection": ["mlr"]})
        body = r.json()
        assert body["overall_mean_diff"] < 0
        assert body["mean_diff_per_model"]["mlr"] < 0

    def test_unfitted_selection_409(self, client):
        r = client.post("/routes/C3/whatif", json={"horizon": 3,
                                                   "model_selection": ["vecm"]})
        assert r.status_code == 409

    def test_schema_violation_400_names_field(self, client):
        r = client.post("/routes/C3/whatif", json={"horizon": 3,
                        "perturbations": {"ore_price": "zap"}})
        assert r.status_code == 400
        assert "perturbations" in r.json()["field"]

    def test_route_mismatch_400(self, client):
        r = client.post("/routes/C3/whatif", json={"horizon": 3, "route_id": "other"})
        assert r.status_code == 400


class TestHistory:
    def test_runs_accumulate_in_order(self, client):
        assert client.get("/routes/C3/history").json() == []
        client.post("/routes/C3/whatif", json={"horizon": 2})
        client.post("/routes/C3/whatif", json={"horizon": 3})
        runs = client.get("/routes/C3/history").json()
        assert [r["run_id"] for r in runs] == [1, 2]

    def test_restart_reloads_history_byte_identically(self, workdir):
        app = create_app(parse_config(workdir / "service.ini"))
        with TestClient(app) as c:
            c.post("/routes/C3/whatif", json={"horizon": 2})
            c.post("/routes/C3/whatif", json={
                "horizon": 3, "perturbations": {"ore_price": [[1, 90.5]]}})
            before = c.get("/routes/C3/history").content
        app2 = create_app(parse_config(workdir / "service.ini"))
        with TestClient(app2) as c2:
            after = c2.get("/routes/C3/history").content
        assert before == after

    def test_concurrent_posts_get_distinct_consecutive_ids(self, client):
        def post(_):
            return client.post("/routes/C3/whatif", json={"horizon": 2,
                               "model_selection": ["mlr"]}).json()["run_id"]

        with ThreadPoolExecutor(max_workers=16) as pool:
            ids = sorted(pool.map(post, range(16)))
        assert ids == list(range(1, 17))


class TestVessels:
    def test_status_filter(self, client):
        all_v = client.get("/vessels", params={"route": "C3"}).json()
        ballast = client.get("/vessels", params={"route": "C3",
                                                 "status": "ballast"}).json()
        assert all(v["cargo_status"] == "ballast" for v in ballast["vessels"])
        assert len(ballast["vessels"]) < len(all_v["vessels"])

    def test_bbox_excluding_all(self, client):
        body = client.get("/vessels", params={"route": "C3",
                                              "bbox": "80,170,81,171"}).json()
        assert body["vessels"] == []

    def test_invalid_bbox_400(self, client):
        r = client.get("/vessels", params={"route": "C3", "bbox": "1,0,-1,0"})
        assert r.status_code == 400

    def test_malformed_bbox_400(self, client):
        r = client.get("/vessels", params={"route": "C3", "bbox": "1,2,3"})
        assert r.status_code == 400

    def test_supply_counts_match_fleet(self, client):
        body = client.get("/vessels", params={"route": "C3"}).json()
        counts = [row[0] for row in body["supply"]["values"]]
        assert counts == [3.0, 3.0, 3.0, 3.0]


class TestStartupValidation:
    def test_missing_data_file_refuses_start(self, tmp_path):
        (tmp_path / "bad.ini").write_text(
            "[route:X]\ndata = nope.csv\ntarget = y\n")
        with pytest.raises(ConfigError):
            create_app(parse_config(tmp_path / "bad.ini"))

    def test_unknown_variable_refuses_start(self, tmp_path):
        frame = gen_linear_market(LinearMarketConfig(seed=1, n_weeks=40))
        (tmp_path / "d.csv").write_text(serialize_frame(frame))
        (tmp_path / "bad.ini").write_text(
            "[route:X]\ndata = d.csv\ntarget = nope\nmodels = mlr\n")
        with pytest.raises(ConfigError):
            create_app(parse_config(tmp_path / "bad.ini"))

    def test_empty_config_serves_empty_listing(self, tmp_path):
        (tmp_path / "empty.ini").write_text("[server]\ndata_dir = .\n")
        app = create_app(parse_config(tmp_path / "empty.ini"))
        with TestClient(app) as c:
            assert c.get("/routes").json() == []


def test_get_endpoints_are_idempotent(client):
    client.post("/routes/C3/whatif", json={"horizon": 2})
    for url, params in [("/routes", None),
                        ("/routes/C3/series", {"window": "near"}),
                        ("/routes/C3/models", None),
                        ("/routes/C3/coefficients", None),
                        ("/routes/C3/history", None),
                        ("/vessels", {"route": "C3"})]:
        first = client.get(url, params=params).content
        second = client.get(url, params=params).content
        assert first == second
