"""HTTP service exposing sessions, commands, metrics, and render buffers.

Sessions live server-side, addressed by id. Each session is single-writer:
command execution takes the session lock, readers see only fully applied
states.
"""

from __future__ import annotations

import math
import threading
import uuid
from typing import Optional

from fastapi import FastAPI, Query, Request, UploadFile
from fastapi.responses import JSONResponse

from . import commands, ingest, metrics, store
from .errors import SessionNotFound, TrackKitError
from .model import Interval, Session, Track, TrackId


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _track_summary(t: Track, index: int) -> dict:
    span = t.span()
    return {
        "id": t.canonical_id,
        "class_label": t.id.class_label,
        "author": t.id.author,
        "version": t.id.version,
        "kind": t.kind,
        "position": index + 1,
        "events": len(t.events),
        "span": [span.start, span.end] if span else None,
        "meta": {
            "display_name": t.meta.display_name,
            "color": list(t.meta.color),
            "visible": t.meta.visible,
            "render_mode": t.meta.render_mode,
            "threshold": t.meta.threshold,
        },
    }


def _events_json(t: Track) -> list:
    return [
        {"start": ev.start, "end": ev.end, "score": ev.score,
         "label": ev.label, "attrs": ev.attrs}
        for ev in t.events
    ]


class SessionRegistry:
    def __init__(self):
        self._sessions = {}
        self._locks = {}
        self._mutex = threading.Lock()

    def create(self, session: Session) -> str:
        sid = uuid.uuid4().hex[:12]
        with self._mutex:
            self._sessions[sid] = session
            self._locks[sid] = threading.Lock()
        return sid

    def get(self, sid: str) -> Session:
        session = self._sessions.get(sid)
        if session is None:
            raise SessionNotFound(f"no session {sid!r}")
        return session

    def lock(self, sid: str) -> threading.Lock:
        if sid not in self._locks:
            raise SessionNotFound(f"no session {sid!r}")
        return self._locks[sid]


def create_app(registry: Optional[SessionRegistry] = None) -> FastAPI:
    app = FastAPI(title="trackkit")
    registry = registry or SessionRegistry()
    app.state.registry = registry

    @app.exception_handler(TrackKitError)
    async def on_trackkit_error(request: Request, exc: TrackKitError):
        status = 404 if isinstance(exc, SessionNotFound) else 400
        return JSONResponse(status_code=status,
                            content={"code": exc.code, "message": str(exc)})

    @app.post("/sessions")
    async def create_session(
        bsx: Optional[UploadFile] = None,
        manifest: Optional[UploadFile] = None,
        csv: Optional[list[UploadFile]] = None,
    ):
        if bsx is not None:
            session = store.bsx_read(await bsx.read())
        else:
            session = Session(domain=Interval(0, 1))
            for f in csv or []:
                # filename convention: <kind>__<class_label>__<author>__<version>.csv
                parts = (f.filename or "").rsplit(".", 1)[0].split("__")
                if len(parts) != 4:
                    return JSONResponse(status_code=400, content={
                        "code": "bad_filename",
                        "message": "CSV filename must be kind__class__author__version.csv",
                    })
                kind, class_label, author, version = parts
                track = ingest.import_csv(
                    await f.read(), kind, TrackId(class_label, author, version),
                )
                session.add(track)
        warnings = []
        if manifest is not None:
            warnings = store.load_manifest(await manifest.read(), session)
        sid = registry.create(session)
        return {"id": sid, "tracks": len(session.tracks), "warnings": warnings}

    @app.get("/sessions/{sid}")
    def session_summary(sid: str):
        s = registry.get(sid)
        return {
            "id": sid,
            "domain": [s.domain.start, s.domain.end],
            "cursor": s.cursor,
            "video": ({"uri": s.video.uri, "offset": s.video.offset}
                      if s.video else None),
            "tracks": len(s.tracks),
        }

    @app.get("/sessions/{sid}/tracks")
    def list_tracks(sid: str, events: bool = False):
        s = registry.get(sid)
        out = [_track_summary(t, i) for i, t in enumerate(s.tracks)]
        if events:
            for item, t in zip(out, s.tracks):
                item["event_list"] = _events_json(t)
        return out

    @app.get("/sessions/{sid}/tracks/{tid}/events")
    def track_events(sid: str, tid: str):
        s = registry.get(sid)
        t = s.get(tid)
        if t is None:
            return JSONResponse(status_code=404,
                                content={"code": "no_track", "message": tid})
        return _events_json(t)

    @app.get("/sessions/{sid}/tracks/{tid}/render")
    def render(sid: str, tid: str, bins: int,
               from_: Optional[int] = Query(None, alias="from"),
               to: Optional[int] = None):
        s = registry.get(sid)
        t = s.get(tid)
        if t is None:
            return JSONResponse(status_code=404,
                                content={"code": "no_track", "message": tid})
        start = s.domain.start if from_ is None else from_
        end = s.domain.end if to is None else to
        buf = store.bin_events(t, Interval(start, end), bins, domain=s.domain)
        return {
            "window": [buf.window.start, buf.window.end],
            "coverage": list(buf.coverage),
            "max_score": list(buf.max_score),
            "covered_ticks": list(buf.covered_ticks),
            "edges": list(buf.edges),
        }

    @app.post("/sessions/{sid}/command")
    def run_command(sid: str, body: dict):
        s = registry.get(sid)
        text = body.get("text", "")
        with registry.lock(sid):
            ast = commands.parse(text)
            effect = commands.execute(s, ast, author=body.get("author", "user"))
        payload = effect.payload
        if effect.kind == "new_track":
            payload = _track_summary(payload, len(s.tracks) - 1)
        elif effect.kind == "playlist":
            payload = {"segments": [list(seg) for seg in payload.segments],
                       "dropped": payload.dropped}
        elif effect.kind == "metric_result" and isinstance(payload, dict):
            payload = _sanitize(payload)
        return {"kind": effect.kind, "payload": payload}

    @app.get("/sessions/{sid}/autocomplete")
    def complete(sid: str, q: str = ""):
        s = registry.get(sid)
        return commands.autocomplete(s, q)

    @app.post("/sessions/{sid}/tracks/{tid}/threshold")
    def set_threshold(sid: str, tid: str, body: dict):
        s = registry.get(sid)
        t = s.get(tid)
        if t is None:
            return JSONResponse(status_code=404,
                                content={"code": "no_track", "message": tid})
        value = float(body["value"])
        with registry.lock(sid):
            from .errors import TypeMismatch

            if t.kind != "classifier":
                raise TypeMismatch(f"{tid} is not a classifier track")
            if not (0.0 <= value <= 1.0):
                raise TypeMismatch(f"threshold out of [0,1]: {value}")
            t.meta.threshold = value
        from . import algebra

        spans = algebra.threshold_intervals(t, value)
        return {"track": tid, "threshold": value,
                "intervals": [list(p) for p in spans.intervals]}

    @app.get("/sessions/{sid}/metrics/roc")
    def roc_endpoint(sid: str, c: str, g: str):
        s = registry.get(sid)
        ct, gt = s.get(c), s.get(g)
        if ct is None or gt is None:
            return JSONResponse(status_code=404, content={
                "code": "no_track", "message": c if ct is None else g})
        curve = metrics.roc(ct, gt, s.domain)
        return {"auc": curve.auc,
                "points": [[p[0], p[1], _finite(p[2])] for p in curve.points]}

    @app.get("/sessions/{sid}/metrics/report")
    def report_endpoint(sid: str, p: str, g: str):
        s = registry.get(sid)
        pt, gt = s.get(p), s.get(g)
        if pt is None or gt is None:
            return JSONResponse(status_code=404, content={
                "code": "no_track", "message": p if pt is None else g})
        rep = metrics.report(pt, gt, s.domain)
        return {
            "accuracy": rep.accuracy, "precision": rep.precision,
            "recall": rep.recall, "f1": rep.f1,
            "containers": {
                name: {"denominator": [list(x) for x in ct.denominator.intervals],
                       "numerator": [list(x) for x in ct.numerator.intervals],
                       "value": ct.value}
                for name, ct in rep.containers.items()
            },
        }

    @app.get("/sessions/{sid}/playlist")
    def playlist_endpoint(sid: str, t: str):
        s = registry.get(sid)
        track = s.get(t)
        if track is None:
            return JSONResponse(status_code=404,
                                content={"code": "no_track", "message": t})
        pl = store.playlist(track, s)
        return {"segments": [list(seg) for seg in pl.segments], "dropped": pl.dropped}

    @app.get("/sessions/{sid}/bsx")
    def export_bsx(sid: str):
        from fastapi.responses import Response

        s = registry.get(sid)
        return Response(content=store.bsx_write(s), media_type="application/gzip")

    return app


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return _finite(obj)
