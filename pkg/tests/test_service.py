import json
import threading
import time
import urllib.error
import urllib.request

import pytest

from mixdialog.script import parse_script, render_script
from mixdialog.service import SessionHub, load_script_dir, make_server

from conftest import BUNDLES


@pytest.fixture(scope="module")
def server():
    hub = SessionHub(load_script_dir(BUNDLES))
    srv = make_server(hub, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base
    srv.shutdown()
    srv.server_close()


def request(base, method, path, payload=None):
    data = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(
        base + path, data=data, method=method, headers={"Content-Type": "application/json"}
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def test_list_scripts(server):
    status, body = request(server, "GET", "/api/scripts")
    assert status == 200
    assert body == ["pizza"]


def test_create_session_snapshot(server):
    status, snap = request(server, "POST", "/api/sessions", {"script": "pizza"})
    assert status == 201
    assert snap["phase"] == "active"
    assert "What size pizza would you like?" in snap["pendingPrompts"]
    assert snap["slots"] == {"size": None, "topping": None, "crust": None, "verify": None}
    assert snap["traceNotation"] == "(Ic Rs)"
    assert len(snap["turnLog"]) == 2


def test_create_sessions_are_distinct(server):
    _, a = request(server, "POST", "/api/sessions", {"script": "pizza"})
    _, b = request(server, "POST", "/api/sessions", {"script": "pizza"})
    assert a["sessionId"] != b["sessionId"]


def test_create_unknown_script(server):
    status, body = request(server, "POST", "/api/sessions", {"script": "nosuch"})
    assert status == 404


def test_post_utterance_updates_snapshot(server):
    _, snap = request(server, "POST", "/api/sessions", {"script": "pizza"})
    sid = snap["sessionId"]
    status, after = request(server, "POST", f"/api/sessions/{sid}/utterances", {"text": "sausage"})
    assert status == 200
    assert after["slots"]["topping"] == "sausage"
    assert "slot topping" not in after["residualScript"]
    assert "slot size" in after["residualScript"]
    assert "(Is" not in after["traceNotation"]  # insertion pair still open
    classifications = [t.get("classification") for t in after["turnLog"] if t["speaker"] == "C"]
    assert classifications == ["out-of-turn"]


def test_residual_snapshot_reparses(server):
    _, snap = request(server, "POST", "/api/sessions", {"script": "pizza"})
    sid = snap["sessionId"]
    for text in ["sausage", "medium", "deep dish"]:
        _, snap = request(server, "POST", f"/api/sessions/{sid}/utterances", {"text": text})
        reparsed = parse_script(snap["residualScript"])
        assert render_script(reparsed) == snap["residualScript"]


def test_get_session_is_pure(server):
    _, snap = request(server, "POST", "/api/sessions", {"script": "pizza"})
    sid = snap["sessionId"]
    status, first = request(server, "GET", f"/api/sessions/{sid}")
    _, second = request(server, "GET", f"/api/sessions/{sid}")
    assert status == 200
    assert first == second
    assert first == snap


def test_get_unknown_session(server):
    status, _ = request(server, "GET", "/api/sessions/deadbeef")
    assert status == 404


def test_post_to_unknown_session(server):
    status, _ = request(server, "POST", "/api/sessions/deadbeef/utterances", {"text": "x"})
    assert status == 404


def test_completed_session_conflicts(server):
    _, snap = request(server, "POST", "/api/sessions", {"script": "pizza"})
    sid = snap["sessionId"]
    for text in ["medium pepperoni deep dish", "yes"]:
        status, snap = request(server, "POST", f"/api/sessions/{sid}/utterances", {"text": text})
        assert status == 200
    assert snap["phase"] == "completed"
    status, _ = request(server, "POST", f"/api/sessions/{sid}/utterances", {"text": "more"})
    assert status == 409


def test_full_dialog_over_http(server):
    _, snap = request(server, "POST", "/api/sessions", {"script": "pizza"})
    sid = snap["sessionId"]
    for text in ["I'd like a sausage pizza, please.", "Medium.", "Deep-dish.", "Yes."]:
        _, snap = request(server, "POST", f"/api/sessions/{sid}/utterances", {"text": text})
    assert snap["phase"] == "completed"
    assert snap["traceNotation"] == "(Ic Rs) (Is (Ic Rs) Rc) (Is Rc) (Is Rc)"
    assert snap["slots"] == {
        "size": "medium",
        "topping": "sausage",
        "crust": "deep dish",
        "verify": "yes",
    }


def test_malformed_body(server):
    status, _ = request(server, "POST", "/api/sessions", {"wrong": 1})
    assert status == 400


def test_idle_sessions_expire():
    hub = SessionHub(load_script_dir(BUNDLES), idle_expiry=0.01)
    sid, _ = hub.create("pizza")
    time.sleep(0.05)
    assert hub.get(sid) is None


def test_concurrent_sessions_are_independent(server):
    _, a = request(server, "POST", "/api/sessions", {"script": "pizza"})
    _, b = request(server, "POST", "/api/sessions", {"script": "pizza"})
    request(server, "POST", f"/api/sessions/{a['sessionId']}/utterances", {"text": "large"})
    _, b_after = request(server, "GET", f"/api/sessions/{b['sessionId']}")
    assert b_after["slots"]["size"] is None
