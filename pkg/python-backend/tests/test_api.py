import pytest
from fastapi.testclient import TestClient

from gossip_age import __version__
from gossip_age.main import app

client = TestClient(app)

LINE_PARAMS = {"p_e": 0.3, "p": 0.2, "beta": 0.6, "L": 10.0}
FC_PARAMS = {"p_e": 0.3, "p": 0.2, "beta": 0.6, "L": 1.6}


def test_root():
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["version"] == __version__


def test_health():
    response = client.get("/api/v1/health/")
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "service": "gossip-age", "version": __version__}


def test_line_ages():
    response = client.post("/api/v1/ages/line", json={"m": 7, "params": LINE_PARAMS})
    assert response.status_code == 200
    body = response.json()
    assert len(body["node_ages"]) == 8
    assert body["threshold"] == pytest.approx(8.0)
    assert max(body["node_ages"]) < 8.0


def test_line_ages_rejects_zero_period():
    response = client.post("/api/v1/ages/line", json={"m": 0, "params": LINE_PARAMS})
    assert response.status_code == 422


def test_line_ages_above_cap_is_a_bad_request():
    response = client.post("/api/v1/ages/line", json={"m": 20_000, "params": LINE_PARAMS})
    assert response.status_code == 400
    assert "cap" in response.json()["detail"]


def test_fc_ages():
    response = client.post("/api/v1/ages/fc", json={"n": 10, "m_sub": 4, "params": FC_PARAMS})
    assert response.status_code == 200
    body = response.json()
    assert len(body["set_ages"]) == 6
    assert body["nonsubscriber_age"] < 1.28


def test_fc_ages_without_subscribers():
    response = client.post("/api/v1/ages/fc", json={"n": 3, "m_sub": 0, "params": FC_PARAMS})
    assert response.status_code == 200
    assert response.json()["set_ages"] == [None, None, None]


def test_fc_ages_with_too_many_subscribers():
    response = client.post("/api/v1/ages/fc", json={"n": 3, "m_sub": 4, "params": FC_PARAMS})
    assert response.status_code == 400


def test_fc_equilibrium():
    response = client.post("/api/v1/equilibrium/fc", json={"n": 10, "p": 0.2, "L": 1.6, "p_e": 0.3})
    assert response.status_code == 200
    body = response.json()
    assert body["m"] == 1
    assert body["beta_limit_zero"] is True
    assert body["utility"] == pytest.approx(0.1)


def test_line_equilibrium():
    payload = {"p": 0.2, "L": 1.6, "p_e": 0.3, "cost": {"a": 80, "q": 2}}
    response = client.post("/api/v1/equilibrium/line", json=payload)
    assert response.status_code == 200
    assert response.json()["m"] == 5


def test_stability_line():
    payload = {"profile": {"topology": {"kind": "line", "m": 7}}, "params": LINE_PARAMS}
    response = client.post("/api/v1/stability", json=payload)
    assert response.status_code == 200
    verdicts = [user["verdict"] for user in response.json()["users"]]
    assert verdicts[0] == "stable-subscriber"
    assert set(verdicts[1:]) == {"stable-nonsubscriber"}


def test_stability_general_graph_is_unprocessable():
    ring = {"kind": "graph", "n": 3, "edges": [[0, 1], [1, 2], [0, 2]], "subscribers": [0]}
    response = client.post("/api/v1/stability", json={"profile": {"topology": ring}, "params": LINE_PARAMS})
    assert response.status_code == 422
