"""Session persistence (BSX), model-metadata manifests, playlists, and
render-ready downsampling.

A BSX document is a JSON payload wrapped in gzip framing (magic 1f 8b);
uncompressed JSON is accepted on read. Unknown fields round-trip.
"""

from __future__ import annotations

import gzip
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    BadMagic,
    InvariantViolation,
    NoVideoBound,
    SchemaVersionUnsupported,
)
from .model import (
    US_PER_SECOND,
    Event,
    EventPayload,
    Interval,
    ModelMeta,
    Session,
    Track,
    TrackId,
    TrackMeta,
    VideoBinding,
    version_key,
)

FORMAT_VERSION = 1

_SESSION_KEYS = {"domain", "video", "cursor"}
_TRACK_KEYS = {"id", "kind", "meta", "events"}


@dataclass(frozen=True)
class Playlist:
    segments: tuple  # (video_uri, start_seconds, end_seconds), ordered by start
    dropped: int = 0


@dataclass(frozen=True)
class RenderBuffer:
    window: Interval
    coverage: tuple  # covered fraction per bin
    max_score: tuple  # max event score per bin, None where no scored event
    covered_ticks: tuple  # exact integer overlap per bin (coverage numerators)
    edges: tuple  # bin edges, len(bins)+1


# -- BSX ----------------------------------------------------------------

def _meta_to_json(meta: TrackMeta) -> dict:
    out = {
        "display_name": meta.display_name,
        "color": list(meta.color),
        "visible": meta.visible,
        "render_mode": meta.render_mode,
        "threshold": meta.threshold,
    }
    if meta.model is not None:
        m = meta.model
        out["model"] = {
            "sensors": list(m.sensors),
            "window_seconds": m.window_seconds,
            "params": dict(m.params),
            "commit_hash": m.commit_hash,
            "commit_message": m.commit_message,
            "committed_at": m.committed_at,
        }
    return out


def _meta_from_json(data: dict) -> TrackMeta:
    model = None
    if data.get("model"):
        m = data["model"]
        model = ModelMeta(
            sensors=tuple(m.get("sensors", ())),
            window_seconds=m.get("window_seconds", 0.0),
            params=m.get("params", {}),
            commit_hash=m.get("commit_hash", ""),
            commit_message=m.get("commit_message", ""),
            committed_at=m.get("committed_at", ""),
        )
    return TrackMeta(
        display_name=data.get("display_name", ""),
        color=tuple(data.get("color", (70, 130, 180))),
        visible=data.get("visible", True),
        render_mode=data.get("render_mode", "blocks"),
        threshold=data.get("threshold"),
        model=model,
    )


def _event_to_json(ev: Event) -> list:
    row = [ev.start, ev.end, ev.score, ev.label, ev.attrs]
    while len(row) > 2 and (row[-1] is None or row[-1] == {}):
        row.pop()
    return row


def _event_from_json(row: list) -> Event:
    start, end = row[0], row[1]
    score = row[2] if len(row) > 2 else None
    label = row[3] if len(row) > 3 else None
    attrs = row[4] if len(row) > 4 else {}
    return Event(Interval(start, end), EventPayload(score=score, label=label, attrs=attrs or {}))


def session_to_json(session: Session) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "session": {
            "domain": [session.domain.start, session.domain.end],
            "video": (
                {"uri": session.video.uri, "offset": session.video.offset}
                if session.video
                else None
            ),
            "cursor": session.cursor,
        },
        "tracks": [
            {
                "id": {
                    "class_label": t.id.class_label,
                    "author": t.id.author,
                    "version": t.id.version,
                },
                "kind": t.kind,
                "meta": _meta_to_json(t.meta),
                "events": [_event_to_json(ev) for ev in t.events],
                **{k: v for k, v in getattr(t, "extra", {}).items()},
            }
            for t in session.tracks
        ],
    }
    for k, v in session.extra.items():
        if k not in doc:
            doc[k] = v
    session_extra = session.extra.get("__session_extra__", {})
    for k, v in session_extra.items():
        if k not in doc["session"]:
            doc["session"][k] = v
    doc.pop("__session_extra__", None)
    return doc


def session_from_json(doc: dict) -> Session:
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise SchemaVersionUnsupported("missing format_version")
    if doc["format_version"] != FORMAT_VERSION:
        raise SchemaVersionUnsupported(f"format_version {doc['format_version']}")
    sess_obj = doc.get("session", {})
    domain = Interval(int(sess_obj["domain"][0]), int(sess_obj["domain"][1]))
    video = None
    if sess_obj.get("video"):
        video = VideoBinding(uri=sess_obj["video"]["uri"],
                             offset=int(sess_obj["video"].get("offset", 0)))
    session = Session(domain=domain, cursor=sess_obj.get("cursor"), video=video)
    for k, v in doc.items():
        if k not in ("format_version", "session", "tracks"):
            session.extra[k] = v
    session_extra = {k: v for k, v in sess_obj.items() if k not in _SESSION_KEYS}
    if session_extra:
        session.extra["__session_extra__"] = session_extra

    for tj in doc.get("tracks", []):
        idj = tj["id"]
        tid = TrackId(idj["class_label"], idj["author"], idj["version"])
        try:
            track = Track(
                id=tid,
                kind=tj["kind"],
                events=[_event_from_json(row) for row in tj.get("events", [])],
                meta=_meta_from_json(tj.get("meta", {})),
            )
        except Exception as exc:
            raise InvariantViolation(tid.canonical(), str(exc))
        track.extra = {k: v for k, v in tj.items() if k not in _TRACK_KEYS}
        session.add(track)
    return session


def bsx_write(session: Session) -> bytes:
    payload = json.dumps(session_to_json(session), separators=(",", ":")).encode("utf-8")
    return gzip.compress(payload, compresslevel=6)


def bsx_read(data: bytes) -> Session:
    if len(data) >= 2 and data[0] == 0x1F and data[1] == 0x8B:
        try:
            payload = gzip.decompress(data)
        except Exception as exc:
            raise BadMagic(f"corrupt gzip stream: {exc}")
    else:
        payload = data
    try:
        doc = json.loads(payload.decode("utf-8"))
    except Exception as exc:
        raise BadMagic(f"not a BSX document: {exc}")
    return session_from_json(doc)


# -- manifest -----------------------------------------------------------

def load_manifest(data: bytes, session: Session) -> list:
    """Attach model metadata to matching tracks.

    Returns a list of warning strings for entries naming absent tracks.
    Idempotent: re-applying the same manifest is a no-op.
    """
    doc = json.loads(data.decode("utf-8"))
    entries = doc.get("models", doc) if isinstance(doc, dict) else doc
    warnings = []
    for entry in entries:
        version_key(entry["version"])  # validates dotted-numeric form
        tid = TrackId(entry["class_label"], entry["author"], entry["version"])
        track = session.get(tid.canonical())
        if track is None:
            warnings.append(f"manifest entry for unknown track {tid.canonical()}")
            continue
        track.meta.model = ModelMeta(
            sensors=tuple(entry.get("sensors", ())),
            window_seconds=entry.get("window_seconds", 0.0),
            params=entry.get("params", {}),
            commit_hash=entry.get("commit_hash", ""),
            commit_message=entry.get("commit_message", ""),
            committed_at=entry.get("committed_at", ""),
        )
    return warnings


# -- playlist -----------------------------------------------------------

def playlist(track: Track, session: Session) -> Playlist:
    """Map event intervals through the video offset into playable seconds."""
    if session.video is None:
        raise NoVideoBound("session has no video binding")
    uri, offset = session.video.uri, session.video.offset
    segments = []
    dropped = 0
    for ev in track.events:
        start = (ev.start - offset) / US_PER_SECOND
        end = (ev.end - offset) / US_PER_SECOND
        if end <= 0:
            dropped += 1
            continue
        segments.append((uri, max(0.0, start), end))
    return Playlist(segments=tuple(segments), dropped=dropped)


# -- render downsampling ------------------------------------------------

def bin_events(track: Track, window: Interval, bins: int,
               domain: Optional[Interval] = None) -> RenderBuffer:
    """Exact per-bin coverage fraction and max score over a window.

    Bin edges partition the window with integer ticks, so the per-bin
    covered_ticks sum to duration(track AND window) exactly.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if domain is not None:
        window = Interval(max(window.start, domain.start), min(window.end, domain.end))
    w0, w1 = window.start, window.end
    width = w1 - w0
    edges = [w0 + (i * width) // bins for i in range(bins + 1)]

    covered = [0] * bins
    scores = [None] * bins
    for ev in track.events:
        s, e = max(ev.start, w0), min(ev.end, w1)
        if s >= e:
            continue
        # locate first bin whose end exceeds s
        lo, hi = 0, bins - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if edges[mid + 1] > s:
                hi = mid
            else:
                lo = mid + 1
        i = lo
        while i < bins and edges[i] < e:
            ov = min(e, edges[i + 1]) - max(s, edges[i])
            if ov > 0:
                covered[i] += ov
                if ev.score is not None:
                    if scores[i] is None or ev.score > scores[i]:
                        scores[i] = ev.score
            i += 1

    coverage = tuple(
        covered[i] / (edges[i + 1] - edges[i]) if edges[i + 1] > edges[i] else 0.0
        for i in range(bins)
    )
    return RenderBuffer(window=window, coverage=coverage, max_score=tuple(scores),
                        covered_ticks=tuple(covered), edges=tuple(edges))
