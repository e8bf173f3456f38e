import json
import threading
import urllib.error
import urllib.request

import pytest

from chartgen.config import EngineConfig
from chartgen.server import start_in_thread
from tests.conftest import fixture_10pt_doc


@pytest.fixture(scope="module")
def server_url():
    server, thread = start_in_thread("127.0.0.1", 0, EngineConfig())
    port = server.server_address[1]
    yield f"http://127.0.0.1:{port}"
    server.shutdown()
    server.server_close()


def post(url, body) -> tuple[int, dict]:
    data = json.dumps(body).encode() if not isinstance(body, bytes) else body
    request = urllib.request.Request(
        url + "/generalize", data=data, headers={"Content-Type": "application/json"}
    )
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, json.loads(response.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def test_health(server_url):
    with urllib.request.urlopen(server_url + "/health") as response:
        assert response.status == 200
        assert json.loads(response.read()) == {"status": "ok"}


def test_generalize_tablet(server_url):
    status, payload = post(
        server_url, {"spec": fixture_10pt_doc(), "width": 1536, "height": 2048}
    )
    assert status == 200
    assert payload["svg"].startswith("<?xml")
    assert "satisfied" in payload["report"]
    assert isinstance(payload["log"], list)
    assert payload["elapsedMs"] > 0


def test_empty_body_is_400(server_url):
    status, payload = post(server_url, b"")
    assert status == 400
    assert "error" in payload


def test_missing_field_reports_path(server_url):
    status, payload = post(server_url, {"spec": fixture_10pt_doc(), "width": 100})
    assert status == 400
    assert payload["error"]["path"] == "height"


def test_bad_spec_reports_field_path(server_url):
    doc = fixture_10pt_doc()
    doc["series"][0]["points"][1]["x"] = doc["series"][0]["points"][0]["x"]
    status, payload = post(server_url, {"spec": doc, "width": 400, "height": 300})
    assert status == 400
    assert "points[1].x" in payload["error"]["path"]


def test_layout_failure_is_422(server_url):
    status, payload = post(server_url, {"spec": fixture_10pt_doc(), "width": 1, "height": 1})
    assert status == 422


def test_identical_posts_identical_svg(server_url):
    body = {"spec": fixture_10pt_doc(), "width": 750, "height": 1334}
    _, first = post(server_url, body)
    _, second = post(server_url, body)
    assert first["svg"] == second["svg"]


def test_concurrent_identical_requests(server_url):
    body = {"spec": fixture_10pt_doc(), "width": 324, "height": 394}
    results: list[str] = []
    lock = threading.Lock()

    def worker():
        _, payload = post(server_url, body)
        with lock:
            results.append(payload["svg"])

    threads = [threading.Thread(target=worker) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(set(results)) == 1


def test_config_overrides_accepted(server_url):
    body = {
        "spec": fixture_10pt_doc(),
        "width": 750,
        "height": 1334,
        "configOverrides": {"seed": 3, "weights": {"importance": 1, "density": 1, "overlap": 1}},
    }
    status, payload = post(server_url, body)
    assert status == 200
    bad = dict(body, configOverrides={"nonsense": True})
    status, payload = post(server_url, bad)
    assert status == 400
    assert payload["error"]["path"] == "configOverrides"
