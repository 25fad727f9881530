import json
import threading
from concurrent.futures import ThreadPoolExecutor

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from sql_assistant import __version__
from sql_assistant.api import service
from sql_assistant.api.service import create_app
from sql_assistant.cli import cli
from sql_assistant.report import emit_report
from sql_assistant.workflow import run_analysis


@pytest.fixture(scope="module")
def client(settings):
    return TestClient(create_app(settings))


def test_check_reports_findings(client):
    response = client.post("/api/check", json={"query": "INSERT INTO Users VALUES (1, 'foo')"})
    assert response.status_code == 200
    body = response.json()
    (finding,) = body["findings"]
    assert finding["kind"] == "implicit_columns"
    assert finding["location"]["statement"] == "request:1:1"
    assert finding["fix"]["mode"] == "textual"


def test_clean_query(client):
    response = client.post("/api/check", json={"query": "SELECT a FROM t"})
    assert response.status_code == 200
    assert response.json()["findings"] == []


@pytest.mark.parametrize(
    "body, error",
    [
        (b"{}", "missing field: query"),
        (b"[1, 2]", "request body must be a JSON object"),
        (b'{"query": 42}', "invalid field: query"),
        (b'{"query": "SELECT 1", "config": {"speed": 1}}', "invalid field: config.speed"),
    ],
)
def test_bad_requests(client, body, error):
    response = client.post("/api/check", content=body, headers={"Content-Type": "application/json"})
    assert response.status_code == 400
    assert response.json()["error"].startswith(error)


def test_malformed_json(client):
    response = client.post("/api/check", content=b"{not json", headers={"Content-Type": "application/json"})
    assert response.status_code == 400
    assert response.json()["error"].startswith("malformed JSON")


def test_missing_field_body_is_exact(client):
    response = client.post("/api/check", json={})
    assert response.json() == {"error": "missing field: query"}


def test_preset_override(client, read_fixture):
    query = read_fixture("ranking.sql")
    c1 = client.post("/api/check", json={"query": query, "config": {"inter_query_mode": "score"}}).json()
    c2 = client.post(
        "/api/check", json={"query": query, "config": {"preset": "C2", "inter_query_mode": "score"}}
    ).json()
    assert c1["config"]["preset"] == "C1"
    assert c2["config"]["preset"] == "C2"
    assert c1["findings"][0]["kind"] == "index_underuse"
    assert c2["findings"][0]["kind"] == "enumerated_types"


def test_custom_weights(client):
    weights = {"w_rp": 1, "w_wp": 0, "w_m": 0, "w_da": 0, "w_di": 0, "w_a": 0}
    body = client.post("/api/check", json={"query": "SELECT 1", "config": {"weights": weights}}).json()
    assert body["config"]["preset"] == "custom"
    assert body["config"]["weights"]["rp"] == 1.0


def test_unknown_preset_is_rejected(client):
    response = client.post("/api/check", json={"query": "SELECT 1", "config": {"preset": "C9"}})
    assert response.status_code == 400
    assert "unknown ranking preset" in response.json()["error"]


def test_health(client):
    assert client.get("/health").json() == {"status": "ok", "version": __version__}


def _key_paths(value, prefix=""):
    if isinstance(value, dict):
        paths = set()
        for key, item in value.items():
            paths |= {f"{prefix}.{key}"} | _key_paths(item, f"{prefix}.{key}")
        return paths
    if isinstance(value, list):
        return set().union(*(_key_paths(item, f"{prefix}[]") for item in value))
    return set()


def test_response_matches_cli_report(client, settings, read_fixture):
    query = read_fixture("ranking.sql")
    body = client.post("/api/check", json={"query": query}).json()

    cli_report = json.loads(
        CliRunner(mix_stderr=False).invoke(cli, ["check", "-", "--format", "json"], input=query).stdout
    )
    assert _key_paths(body) == _key_paths(cli_report)

    library = emit_report(run_analysis([("request", query)], settings=settings), "json")
    assert json.loads(library) == body


def test_identical_requests_give_identical_bodies(client, read_fixture):
    payload = {"query": read_fixture("user_lists.sql", "ranking.sql"), "config": {"preset": "C2"}}
    first = client.post("/api/check", json=payload)
    second = client.post("/api/check", json=payload)
    assert first.status_code == second.status_code == 200
    assert first.content == second.content


def test_requests_are_handled_concurrently(settings, monkeypatch):
    barrier = threading.Barrier(2, timeout=5)

    def wait_for_peer(raw, base):
        barrier.wait()
        return 200, b"{}"

    monkeypatch.setattr(service, "handle_check", wait_for_peer)
    with TestClient(create_app(settings)) as client, ThreadPoolExecutor(max_workers=2) as pool:
        futures = [pool.submit(client.post, "/api/check", json={"query": "SELECT 1"}) for _ in range(2)]
        assert [f.result(timeout=15).status_code for f in futures] == [200, 200]
