import json

import pytest
from fastapi.testclient import TestClient

from trackkit import store
from trackkit.model import Interval, Session, VideoBinding
from trackkit.service import SessionRegistry, create_app

from conftest import make_track

S = 1_000_000


@pytest.fixture
def client():
    return TestClient(create_app())


def demo_session():
    s = Session(domain=Interval(0, 100 * S))
    s.video = VideoBinding(uri="v.mp4", offset=0)
    s.add(make_track([(1 * S, 3 * S), (10 * S, 12 * S)], kind="classifier",
                     class_label="Walking", author="John",
                     scores=[0.9, 0.6], threshold=0.5))
    s.add(make_track([(1 * S, 2 * S), (10 * S, 12 * S)], kind="label",
                     class_label="Walking", author="Mary"))
    return s


@pytest.fixture
def sid(client):
    blob = store.bsx_write(demo_session())
    r = client.post("/sessions", files={"bsx": ("s.bsx", blob)})
    assert r.status_code == 200, r.text
    return r.json()["id"]


class TestSessions:
    def test_create_from_bsx_and_summary(self, client, sid):
        r = client.get(f"/sessions/{sid}")
        body = r.json()
        assert body["tracks"] == 2
        assert body["domain"] == [0, 100 * S]

    def test_unknown_session_404(self, client):
        r = client.get("/sessions/nope")
        assert r.status_code == 404
        assert r.json()["code"] == "session_not_found"

    def test_create_from_csv_and_manifest(self, client):
        csv_data = b"start,end,score\n0,1,0.9\n2,3,0.8\n"
        manifest = json.dumps({"models": [{
            "class_label": "Walking", "author": "John", "version": "1.0",
            "commit_hash": "abc1", "sensors": ["wrist"]}]}).encode()
        r = client.post("/sessions", files=[
            ("csv", ("classifier__Walking__John__1.0.csv", csv_data)),
            ("manifest", ("manifest.json", manifest)),
        ])
        assert r.status_code == 200, r.text
        assert r.json()["tracks"] == 1
        assert r.json()["warnings"] == []

    def test_list_tracks(self, client, sid):
        r = client.get(f"/sessions/{sid}/tracks")
        body = r.json()
        assert [t["id"] for t in body] == ["WalkingJohn1.0", "WalkingMary1.0"]
        assert body[0]["position"] == 1
        assert body[0]["meta"]["threshold"] == 0.5


class TestRender:
    def test_render_buffer(self, client, sid):
        r = client.get(f"/sessions/{sid}/tracks/WalkingJohn1.0/render",
                       params={"from": 0, "to": 4 * S, "bins": 4})
        body = r.json()
        assert len(body["coverage"]) == 4
        assert body["coverage"][1] == 1.0  # [1s,2s) fully covered
        assert body["max_score"][1] == 0.9

    def test_render_defaults_to_domain(self, client, sid):
        r = client.get(f"/sessions/{sid}/tracks/WalkingJohn1.0/render",
                       params={"bins": 10})
        assert r.json()["window"] == [0, 100 * S]


class TestCommands:
    def test_command_creates_track(self, client, sid):
        r = client.post(f"/sessions/{sid}/command", json={"text": "subtract 1 2"})
        body = r.json()
        assert body["kind"] == "new_track"
        assert body["payload"]["kind"] == "label"
        r2 = client.get(f"/sessions/{sid}/tracks")
        assert len(r2.json()) == 3

    def test_command_error_payload(self, client, sid):
        r = client.post(f"/sessions/{sid}/command", json={"text": "jaccard"})
        assert r.status_code == 400
        assert r.json()["code"] == "arity"
        assert "message" in r.json()

    def test_playlist_command(self, client, sid):
        r = client.post(f"/sessions/{sid}/command",
                        json={"text": "play WalkingJohn1.0"})
        body = r.json()
        assert body["kind"] == "playlist"
        assert body["payload"]["segments"] == [["v.mp4", 1.0, 3.0],
                                               ["v.mp4", 10.0, 12.0]]

    def test_autocomplete_endpoint(self, client, sid):
        r = client.get(f"/sessions/{sid}/autocomplete", params={"q": "thresh"})
        assert r.json() == ["threshold"]


class TestThresholdEndpoint:
    def test_set_threshold_returns_intervals(self, client, sid):
        r = client.post(f"/sessions/{sid}/tracks/WalkingJohn1.0/threshold",
                        json={"value": 0.7})
        body = r.json()
        assert body["threshold"] == 0.7
        assert body["intervals"] == [[1 * S, 3 * S]]

    def test_reject_non_classifier(self, client, sid):
        r = client.post(f"/sessions/{sid}/tracks/WalkingMary1.0/threshold",
                        json={"value": 0.7})
        assert r.status_code == 400


class TestMetricsEndpoints:
    def test_report(self, client, sid):
        r = client.get(f"/sessions/{sid}/metrics/report",
                       params={"p": "WalkingJohn1.0", "g": "WalkingMary1.0"})
        body = r.json()
        # P = [1,3)+[10,12) = 4s, G = [1,2)+[10,12) = 3s, TP = 3s
        assert body["precision"] == 0.75
        assert body["recall"] == 1.0
        assert set(body["containers"]) == {"precision", "recall", "accuracy", "f1"}

    def test_roc(self, client, sid):
        r = client.get(f"/sessions/{sid}/metrics/roc",
                       params={"c": "WalkingJohn1.0", "g": "WalkingMary1.0"})
        body = r.json()
        assert 0.0 <= body["auc"] <= 1.0
        assert body["points"][0][:2] == [0.0, 0.0]
        assert body["points"][-1][:2] == [1.0, 1.0]

    def test_playlist_endpoint(self, client, sid):
        r = client.get(f"/sessions/{sid}/playlist",
                       params={"t": "WalkingMary1.0"})
        assert r.json()["segments"] == [["v.mp4", 1.0, 2.0], ["v.mp4", 10.0, 12.0]]


class TestExportAndSnapshotReads:
    def test_bsx_export_round_trip(self, client, sid):
        r = client.get(f"/sessions/{sid}/bsx")
        out = store.bsx_read(r.content)
        assert store.session_to_json(out) == store.session_to_json(demo_session())

    def test_reads_never_see_partial_command(self, client, sid):
        # a failing command must not leave a half-added track behind
        before = client.get(f"/sessions/{sid}/tracks").json()
        r = client.post(f"/sessions/{sid}/command",
                        json={"text": "union 1 nonexistent"})
        assert r.status_code == 400
        after = client.get(f"/sessions/{sid}/tracks").json()
        assert before == after
