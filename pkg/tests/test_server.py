"""HTTP API: route payloads, bounds, error mapping, CORS."""

import json

import pytest
from fastapi.testclient import TestClient

from didgraph.scenarios import SCENARIO_NAMES, get_scenario
from didgraph.server import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def _graph_body(name="fig4", form="compact", **extra):
    sc = get_scenario(name)
    graph = (sc.compact if form == "compact" else sc.natural).to_json_dict()
    return {"graph": graph, **extra}


def test_scenarios_catalog(client):
    payload = client.get("/api/scenarios").json()
    assert payload["schema"] == "1"
    names = [s["name"] for s in payload["scenarios"]]
    assert tuple(names) == SCENARIO_NAMES
    fig4 = next(s for s in payload["scenarios"] if s["name"] == "fig4")
    assert fig4["truth"] == {"1": "a"}
    assert fig4["compact"]["form"] == "compact"
    assert "dY(X)" in fig4["estimators"]


def test_validate_ok_and_diagnostics(client):
    assert client.post("/api/validate", json=_graph_body()).json()["ok"] is True
    bad = {
        "graph": {
            "nodes": [
                {"name": "A", "time": 0, "role": "treatment"},
                {"name": "B", "time": 0, "role": "covariate"},
            ],
            "edges": [
                {"src": "A", "dst": "B", "coeff": "a"},
                {"src": "B", "dst": "A", "coeff": "b"},
            ],
            "form": "natural",
        }
    }
    verdict = client.post("/api/validate", json=bad).json()
    assert verdict["ok"] is False
    assert any(d["code"] == "cycle" for d in verdict["diagnostics"])


def test_unknown_graph_field_is_400(client):
    body = _graph_body()
    body["graph"]["surprise"] = 1
    response = client.post("/api/validate", json=body)
    assert response.status_code == 400
    assert response.json()["error"]["type"]


def test_compact_golden(client):
    response = client.post("/api/compact", json=_graph_body("fig4", form="natural"))
    graph = response.json()["graph"]
    labels = {(e["src"], e["dst"]): e["coeff"] for e in graph["edges"]}
    assert labels[("S0", "dY1")] == "e-d"
    assert labels[("W0", "dY1")] == "h-f"


def test_sets_golden(client):
    body = _graph_body("s5_2", treatment="A1", outcome="dY1")
    assert client.post("/api/sets", json=body).json()["sets"] == [["W0"], ["Z0"]]


def test_trace_with_assignment(client):
    sc = get_scenario("fig4")
    body = _graph_body(
        "fig4",
        **{"from": "A1", "to": "dY1", "given": ["W0"],
           "assign": dict(sc.assignment)},
    )
    payload = client.post("/api/trace", json=body).json()
    assert payload["sum"] == "a"
    assert payload["value"] == pytest.approx(
        sc.truth[1].evaluate(dict(sc.assignment))
    )


def test_identify_statuses(client):
    ok = client.post(
        "/api/identify",
        json=_graph_body("fig4", treatment="A1", outcome="dY1", set=["W0"]),
    ).json()
    assert ok["status"] == "sufficient"
    offset = client.post(
        "/api/identify",
        json=_graph_body("s5_1", treatment="A1", outcome="dY1", set=[]),
    ).json()
    assert offset["status"] == "sufficient"
    assert offset["path_sum"] == "0"
    bad = client.post(
        "/api/identify",
        json=_graph_body("s5_1", treatment="A1", outcome="dY1", set=["Z1"]),
    ).json()
    assert bad["status"] == "insufficient"


def test_align_golden(client):
    pooled = client.post(
        "/api/align",
        json={
            "scenario": "fig4",
            "estimator": "Y(X) TWFE",
            "plan": [{"covariate": "W0"}],
        },
    ).json()
    assert pooled == {
        "unclear": False,
        "per_period": {"1": []},
        "notes": ["time-constant regressors cancel from the implied difference"],
        "category": "insufficient",
    }
    dcdh = client.post(
        "/api/align",
        json={
            "scenario": "fig4",
            "estimator": "dcdh",
            "plan": [{"covariate": "W0", "strategy": "interact"}],
        },
    ).json()
    assert dcdh["per_period"] == {"1": [["W", 0]]}
    assert dcdh["category"] == "sufficient"


def test_simulate_bound_and_csv(client):
    ok = client.post("/api/simulate", json={"scenario": "fig4", "n": 60, "seed": 1})
    assert ok.status_code == 200
    assert ok.json()["csv"].startswith("unit,period,A,Y,W\r\n")
    too_big = client.post("/api/simulate", json={"scenario": "fig4", "n": 50001})
    assert too_big.status_code == 400
    assert "bound" in too_big.json()["error"]["message"]


def test_bench_bound_and_report(client):
    config = {
        "scenarios": ["fig4"],
        "n": 100,
        "reps": 3,
        "estimators": ["dY(X)"],
    }
    payload = client.post("/api/bench", json={"config": config}).json()
    assert {r["category"] for r in payload["rows"]} == {
        "sufficient",
        "insufficient",
    }
    assert payload["aggregates"]
    config["reps"] = 101
    denied = client.post("/api/bench", json={"config": config})
    assert denied.status_code == 400


def test_domain_error_shape(client):
    response = client.post(
        "/api/sets", json=_graph_body(treatment="A1", outcome="QQ")
    )
    assert response.status_code == 400
    error = response.json()["error"]
    assert set(error) == {"type", "message"}


def test_cors_open(client):
    response = client.get("/api/scenarios", headers={"Origin": "http://x.test"})
    assert response.headers["access-control-allow-origin"] == "*"
