"""Command language: parsing, track-reference resolution, execution,
autocomplete, and smart ordering.

Grammar is a flat `op arg arg ...` line. Track references resolve by
exact canonical id, 1-based display position, "%" substring wildcard,
or unique class-label prefix, narrowed by the operand type the operator
expects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from . import algebra, metrics, store
from .errors import (
    AmbiguousRef,
    ArityError,
    FilterSyntaxError,
    NoCursor,
    NoMatch,
    TypeMismatch,
    UnknownOperator,
)
from .model import (
    US_PER_SECOND,
    Event,
    EventPayload,
    Interval,
    Session,
    Track,
    TrackId,
    TrackMeta,
)

# op -> (min_args, max_args); track-ref positions are typed below
ARITY = {
    "negate": (1, 1),
    "union": (2, 2),
    "intersection": (2, 2),
    "errors": (2, 2),
    "subtract": (2, 2),
    "match": (2, 2),
    "variation": (1, 2),
    "play": (1, 1),
    "threshold": (2, 2),
    "show": (1, 1),
    "hide": (1, 1),
    "transform": (1, 1),
    "rename": (2, 2),
    "color": (2, 2),
    "author": (1, 1),
    "filter": (2, 2),
    "order": (0, 0),
    "info": (1, 1),
    "jaccard": (2, 2),
    "roc": (2, 2),
    "report": (2, 2),
    "score": (1, 1),
}

ALIASES = {"add": "union"}

# operand-kind expectations per argument position (None = any track kind)
EXPECTED_KINDS = {
    "threshold": [{"classifier"}],
    "transform": [{"classifier"}],
    "roc": [{"classifier"}, {"label", "protocol"}],
    "report": [None, {"label", "protocol"}],
}

MULTI_REF_OPS = {"show", "hide"}

COLOR_NAMES = {
    "red": (220, 20, 60),
    "green": (46, 139, 87),
    "blue": (70, 130, 180),
    "orange": (255, 140, 0),
    "purple": (128, 0, 128),
    "yellow": (218, 165, 32),
    "gray": (128, 128, 128),
    "black": (0, 0, 0),
    "white": (255, 255, 255),
    "cyan": (0, 139, 139),
    "magenta": (199, 21, 133),
}

_CONJUNCT_RE = re.compile(
    r"^([A-Za-z_][A-Za-z0-9_]*)(<=|>=|==|!=|<|>)(-?[0-9]+(?:\.[0-9]+)?)$"
)


@dataclass(frozen=True)
class TrackRef:
    raw: str


@dataclass(frozen=True)
class FilterExpr:
    conjuncts: tuple  # of (attr, cmp, rhs)


@dataclass(frozen=True)
class CommandAST:
    op: str
    args: tuple


@dataclass
class Effect:
    kind: str  # new_track | metric_result | visibility_change | playlist | reorder | info_payload
    payload: object = None


def parse(text: str) -> CommandAST:
    tokens = text.split()
    if not tokens:
        raise UnknownOperator("empty command")
    op = ALIASES.get(tokens[0].lower(), tokens[0].lower())
    if op not in ARITY:
        raise UnknownOperator(f"unknown operator {tokens[0]!r}")
    raw_args = tokens[1:]
    lo, hi = ARITY[op]
    if not (lo <= len(raw_args) <= hi):
        raise ArityError(f"{op} takes {lo}" + (f"-{hi}" if hi != lo else "") +
                         f" argument(s), got {len(raw_args)}")

    args = []
    if op == "filter":
        args = [TrackRef(raw_args[0]), parse_filter(raw_args[1], offset=len(op) + len(raw_args[0]) + 2)]
    elif op == "threshold":
        args = [TrackRef(raw_args[0]), _parse_number(raw_args[1])]
    elif op == "rename":
        args = [TrackRef(raw_args[0]), raw_args[1]]
    elif op == "color":
        args = [TrackRef(raw_args[0]), parse_color(raw_args[1])]
    elif op == "author":
        args = [raw_args[0]]
    else:
        args = [TrackRef(a) for a in raw_args]
    return CommandAST(op=op, args=tuple(args))


def _parse_number(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ArityError(f"expected a number, got {token!r}")


def parse_color(token: str) -> tuple:
    if token.lower() in COLOR_NAMES:
        return COLOR_NAMES[token.lower()]
    m = re.fullmatch(r"#?([0-9a-fA-F]{6})", token)
    if not m:
        raise ArityError(f"expected a color (#rrggbb or name), got {token!r}")
    h = m.group(1)
    return (int(h[0:2], 16), int(h[2:4], 16), int(h[4:6], 16))


def parse_filter(text: str, offset: int = 0) -> FilterExpr:
    if not text:
        raise FilterSyntaxError("empty filter expression", offset)
    conjuncts = []
    pos = offset
    for part in text.split("&"):
        m = _CONJUNCT_RE.match(part)
        if not m:
            raise FilterSyntaxError(f"bad conjunct {part!r}", pos)
        conjuncts.append((m.group(1), m.group(2), float(m.group(3))))
        pos += len(part) + 1
    return FilterExpr(conjuncts=tuple(conjuncts))


def resolve(
    session: Session,
    ref: TrackRef,
    op: str = "",
    arg_index: int = 0,
) -> Union[TrackId, list]:
    """Resolve a reference to one TrackId (or several, for show/hide)."""
    raw = ref.raw
    multi_ok = op in MULTI_REF_OPS
    kinds = None
    expected = EXPECTED_KINDS.get(op)
    if expected and arg_index < len(expected):
        kinds = expected[arg_index]

    exact = session.get(raw)
    if exact is not None:
        return [exact.id] if multi_ok else exact.id

    if raw.isdigit():
        idx = int(raw)
        if not (1 <= idx <= len(session.tracks)):
            raise NoMatch(f"position {idx} out of range (1..{len(session.tracks)})")
        tid = session.tracks[idx - 1].id
        return [tid] if multi_ok else tid

    if raw.startswith("%"):
        needle = raw[1:].lower()
        hits = [t.id for t in session.tracks if needle in t.canonical_id.lower()]
        if not hits:
            raise NoMatch(f"no track matches wildcard {raw!r}")
        if multi_ok:
            return hits
        if len(hits) > 1:
            raise AmbiguousRef(raw, [str(h) for h in hits])
        return hits[0]

    candidates = [
        t for t in session.tracks
        if t.id.class_label.lower().startswith(raw.lower())
        and (kinds is None or t.kind in kinds)
    ]
    if not candidates:
        raise NoMatch(f"no track matches {raw!r}")
    if len(candidates) > 1 and not multi_ok:
        raise AmbiguousRef(raw, [t.canonical_id for t in candidates])
    if multi_ok:
        return [t.id for t in candidates]
    return candidates[0].id


def _track(session: Session, ref, op: str, arg_index: int) -> Track:
    tid = resolve(session, ref, op, arg_index)
    return session.get(tid.canonical())


def _unique_id(session: Session, tid: TrackId) -> TrackId:
    out = tid
    while session.get(out.canonical()) is not None:
        parts = out.version.split(".")
        parts[-1] = str(int(parts[-1]) + 1)
        out = TrackId(out.class_label, out.author, ".".join(parts))
    return out


_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def _event_passes(ev: Event, expr: FilterExpr) -> bool:
    for attr, cmp, rhs in expr.conjuncts:
        if attr == "duration":
            lhs = ev.interval.length / US_PER_SECOND
        else:
            lhs = ev.attrs.get(attr)
            if not isinstance(lhs, (int, float)):
                return False
        if not _CMP[cmp](lhs, rhs):
            return False
    return True


def execute(session: Session, ast: CommandAST, author: str = "user") -> Effect:
    op = ast.op

    if op in ("union", "intersection", "errors", "subtract", "match", "negate"):
        return _execute_algebra(session, ast, author)

    if op == "variation":
        new = _track(session, ast.args[0], op, 0)
        old = _track(session, ast.args[1], op, 1) if len(ast.args) > 1 else None
        diff = algebra.variation(new, old, session=session)
        events = [
            Event(Interval(s, e), EventPayload(label="added"))
            for s, e in diff.added.intervals
        ] + [
            Event(Interval(s, e), EventPayload(label="removed"))
            for s, e in diff.removed.intervals
        ]
        events.sort(key=lambda ev: (ev.start, ev.end))
        operand = old.canonical_id if old else new.canonical_id
        tid = _unique_id(session, TrackId(
            f"variation({new.canonical_id},{operand})", author, "1.0"))
        track = Track(id=tid, kind="diff", events=events)
        session.add(track)
        return Effect("new_track", track)

    if op == "play":
        track = _track(session, ast.args[0], op, 0)
        return Effect("playlist", store.playlist(track, session))

    if op == "threshold":
        track = _track(session, ast.args[0], op, 0)
        if track.kind != "classifier":
            raise TypeMismatch(f"threshold needs a classifier, got {track.kind}")
        value = ast.args[1]
        if not (0.0 <= value <= 1.0):
            raise TypeMismatch(f"threshold out of [0,1]: {value}")
        track.meta.threshold = value
        return Effect("visibility_change", {"track": track.canonical_id, "threshold": value})

    if op in ("show", "hide"):
        tids = resolve(session, ast.args[0], op, 0)
        for tid in tids:
            session.get(tid.canonical()).meta.visible = (op == "show")
        return Effect("visibility_change",
                      {"visible": op == "show", "tracks": [str(t) for t in tids]})

    if op == "transform":
        track = _track(session, ast.args[0], op, 0)
        if track.kind != "classifier":
            raise TypeMismatch(f"transform needs a classifier, got {track.kind}")
        spans = algebra.threshold_intervals(track, track.meta.threshold)
        events = [
            Event(Interval(s, e), EventPayload(label=track.id.class_label,
                                               attrs={"src": track.canonical_id}))
            for s, e in spans.intervals
        ]
        tid = _unique_id(session, TrackId(
            f"transform({track.canonical_id})", author, "1.0"))
        out = Track(id=tid, kind="label", events=events)
        session.add(out)
        return Effect("new_track", out)

    if op == "rename":
        track = _track(session, ast.args[0], op, 0)
        track.meta.display_name = ast.args[1]
        return Effect("visibility_change", {"track": track.canonical_id,
                                            "display_name": ast.args[1]})

    if op == "color":
        track = _track(session, ast.args[0], op, 0)
        track.meta.color = ast.args[1]
        return Effect("visibility_change", {"track": track.canonical_id,
                                            "color": list(ast.args[1])})

    if op == "author":
        name = ast.args[0]
        mine = [t for t in session.tracks if t.id.author.lower() == name.lower()]
        if not mine:
            raise NoMatch(f"no tracks by author {name!r}")
        for t in mine:
            t.meta.visible = True
        rest = [t for t in session.tracks if t not in mine]
        session.tracks[:] = mine + rest
        return Effect("visibility_change",
                      {"visible": True, "tracks": [t.canonical_id for t in mine],
                       "order": [t.canonical_id for t in session.tracks]})

    if op == "filter":
        track = _track(session, ast.args[0], op, 0)
        expr = ast.args[1]
        events = [ev for ev in track.events if _event_passes(ev, expr)]
        tid = _unique_id(session, TrackId(
            f"filter({track.canonical_id})", author, "1.0"))
        out = Track(id=tid, kind=track.kind, events=events,
                    meta=TrackMeta(threshold=track.meta.threshold
                                   if track.kind == "classifier" else None))
        session.add(out)
        return Effect("new_track", out)

    if op == "order":
        order = smart_order(session, session.cursor)
        return Effect("reorder", [str(t) for t in order])

    if op == "info":
        track = _track(session, ast.args[0], op, 0)
        payload = {
            "id": track.canonical_id,
            "kind": track.kind,
            "display_name": track.meta.display_name,
            "events": len(track.events),
            "duration_us": sum(ev.interval.length for ev in track.events),
            "threshold": track.meta.threshold,
        }
        if track.meta.model is not None:
            m = track.meta.model
            payload["model"] = {
                "sensors": list(m.sensors),
                "window_seconds": m.window_seconds,
                "params": dict(m.params),
                "commit_hash": m.commit_hash,
                "commit_message": m.commit_message,
                "committed_at": m.committed_at,
            }
        return Effect("info_payload", payload)

    if op == "jaccard":
        a = _track(session, ast.args[0], op, 0)
        b = _track(session, ast.args[1], op, 1)
        return Effect("metric_result", {"metric": "jaccard",
                                        "value": metrics.jaccard(a, b)})

    if op == "roc":
        c = _track(session, ast.args[0], op, 0)
        g = _track(session, ast.args[1], op, 1)
        if c.kind != "classifier":
            raise TypeMismatch("roc needs a classifier as first operand")
        if g.kind not in ("label", "protocol"):
            raise TypeMismatch("roc needs a label track as second operand")
        curve = metrics.roc(c, g, session.domain)
        return Effect("metric_result", {"metric": "roc", "auc": curve.auc,
                                        "points": list(curve.points)})

    if op == "report":
        p = _track(session, ast.args[0], op, 0)
        g = _track(session, ast.args[1], op, 1)
        if g.kind not in ("label", "protocol"):
            raise TypeMismatch("report needs a label track as second operand")
        rep = metrics.report(p, g, session.domain)
        return Effect("metric_result", {
            "metric": "report",
            "accuracy": rep.accuracy, "precision": rep.precision,
            "recall": rep.recall, "f1": rep.f1,
            "containers": {
                name: {"denominator": list(c.denominator.intervals),
                       "numerator": list(c.numerator.intervals),
                       "value": c.value}
                for name, c in rep.containers.items()
            },
        })

    if op == "score":
        p = _track(session, ast.args[0], op, 0)
        truths = [t for t in session.tracks
                  if t.kind in ("label", "protocol")
                  and t.id.class_label == p.id.class_label
                  and t is not p]
        if not truths:
            raise NoMatch(f"no label track named {p.id.class_label!r} to score against")
        if len(truths) > 1:
            raise AmbiguousRef(p.id.class_label, [t.canonical_id for t in truths])
        es = metrics.event_score(p, truths[0])
        return Effect("metric_result", {"metric": "score", "detected": es.detected,
                                        "total": es.total, "value": es.score})

    raise UnknownOperator(op)


def _execute_algebra(session: Session, ast: CommandAST, author: str) -> Effect:
    op = ast.op
    operands = [_track(session, a, op, i) for i, a in enumerate(ast.args)]
    if op == "negate":
        result = algebra.negate(algebra.to_interval_set(operands[0]), session.domain)
    else:
        fn = {
            "union": algebra.union,
            "intersection": algebra.intersect,
            "errors": algebra.sym_diff,
            "subtract": algebra.subtract,
        }.get(op)
        if fn is not None:
            result = fn(operands[0], operands[1])
        else:  # match
            kept = algebra.match_subtract(operands[0],
                                          algebra.to_interval_set(operands[1]))
            result = algebra.IntervalSet.of(kept)
    track = algebra.as_label_track(result, op, operands, author=author,
                                   label_union=(op == "union"))
    track.id = _unique_id(session, track.id)
    track.meta.display_name = track.id.canonical()
    session.add(track)
    return Effect("new_track", track)


OPERATORS = sorted(set(ARITY) | set(ALIASES))


def autocomplete(session: Session, partial: str) -> list:
    """Ranked suggestions for a partial command line."""
    if " " not in partial.strip() and not partial.endswith(" "):
        stem = partial.strip().lower()
        return [op for op in OPERATORS if op.startswith(stem)]

    tokens = partial.split()
    op = ALIASES.get(tokens[0].lower(), tokens[0].lower())
    if op not in ARITY:
        return []
    trailing = partial.endswith(" ")
    stem = "" if trailing else tokens[-1]
    done_args = tokens[1:] if trailing else tokens[1:-1]
    arg_index = len(done_args)

    kinds = None
    expected = EXPECTED_KINDS.get(op)
    if expected and arg_index < len(expected):
        kinds = expected[arg_index]

    candidates = []
    for t in session.tracks:
        if kinds is not None and t.kind not in kinds:
            continue
        cid = t.canonical_id
        if stem.startswith("%"):
            if stem[1:].lower() in cid.lower():
                candidates.append((1, cid))
        elif cid.lower().startswith(stem.lower()) or \
                t.id.class_label.lower().startswith(stem.lower()):
            candidates.append((0, cid))
        elif stem and stem.lower() in cid.lower():
            candidates.append((2, cid))
        elif not stem:
            candidates.append((1, cid))
    candidates.sort()
    prefix = " ".join([tokens[0]] + done_args)
    return [f"{prefix} {cid}" for _, cid in candidates]


def smart_order(session: Session, t: Optional[int] = None,
                eps: int = 2 * US_PER_SECOND) -> list:
    """Promote tracks with events near tick t; remember prior interest.

    Previously promoted tracks that still overlap (t-eps, t+eps) keep
    their relative positions at the top; newly overlapping tracks follow,
    sorted by descending overlap duration; everything else keeps its
    prior relative order below.
    """
    if t is None:
        t = session.cursor
    if t is None:
        raise NoCursor("smart ordering needs a cursor")
    window = algebra.IntervalSet.of([(t - eps, t + eps)])

    overlap = {}
    for track in session.tracks:
        spans = algebra.to_interval_set(track)
        overlap[track.canonical_id] = algebra.intersect(spans, window).duration()

    still = [tid for tid in session.promoted
             if session.get(tid.canonical()) is not None
             and overlap.get(tid.canonical(), 0) > 0]
    still_keys = {tid.canonical() for tid in still}
    fresh = sorted(
        (trk for trk in session.tracks
         if overlap[trk.canonical_id] > 0 and trk.canonical_id not in still_keys),
        key=lambda trk: -overlap[trk.canonical_id],
    )
    promoted_keys = still_keys | {trk.canonical_id for trk in fresh}
    rest = [trk for trk in session.tracks if trk.canonical_id not in promoted_keys]

    ordered = [session.get(tid.canonical()) for tid in still] + fresh + rest
    session.tracks[:] = ordered
    session.promoted = [trk.id for trk in ordered[: len(still) + len(fresh)]]
    return [trk.id for trk in ordered]
