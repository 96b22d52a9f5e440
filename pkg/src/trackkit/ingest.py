"""Ingest: prediction-stream compression and CSV import.

High-frequency classifier output is run-length compressed before it ever
reaches a track: consecutive predictions whose gap, score, and attributes
stay within tolerances of the *first* prediction of the current run are
merged into one longer event.
"""

from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import ROUND_HALF_EVEN, Decimal, InvalidOperation
from typing import Optional

from .errors import (
    BadTimestamp,
    MissingColumn,
    OverlappingPredictions,
    UnexpectedColumn,
    UnsortedStream,
)
from .model import (
    US_PER_SECOND,
    Event,
    EventPayload,
    Interval,
    Track,
    TrackId,
    normalize,
)


@dataclass(frozen=True)
class RawPrediction:
    interval: Interval
    score: float
    attrs: dict = field(default_factory=dict)

    @property
    def start(self):
        return self.interval.start

    @property
    def end(self):
        return self.interval.end


@dataclass
class CompressionConfig:
    eps_t: Optional[int] = None  # max gap in ticks; None = auto (2x median gap)
    eps_s: float = 0.05  # max |s_i - s_1|
    eps_a: dict = field(default_factory=dict)  # per-attribute tolerance, default exact

    def __post_init__(self):
        if self.eps_t is not None and self.eps_t < 0:
            raise ValueError("eps_t must be >= 0")
        if self.eps_s < 0:
            raise ValueError("eps_s must be >= 0")
        for k, v in self.eps_a.items():
            if v < 0:
                raise ValueError(f"eps_a[{k!r}] must be >= 0")


def _auto_eps_t(stream: list) -> int:
    gaps = [b.start - a.end for a, b in zip(stream, stream[1:])]
    if not gaps:
        return 0
    return int(2 * statistics.median(gaps))


def compress(stream: list, cfg: Optional[CompressionConfig] = None) -> list:
    """Greedy left-to-right run formation over a sorted prediction stream.

    A prediction extends the current run iff its gap from the previous
    prediction is <= eps_t AND its score and every attribute stay within
    tolerance of the run's FIRST member. The merged event spans the run,
    score and numeric attrs are arithmetic means, text attrs keep the
    first value.
    """
    cfg = cfg or CompressionConfig()
    for a, b in zip(stream, stream[1:]):
        if b.start < a.start:
            raise UnsortedStream(f"prediction at {b.start} after {a.start}")
        if b.start < a.end:
            raise OverlappingPredictions(f"[{a.start},{a.end}) overlaps [{b.start},{b.end})")
    if not stream:
        return []
    eps_t = cfg.eps_t if cfg.eps_t is not None else _auto_eps_t(stream)

    events = []
    run = [stream[0]]
    for p in stream[1:]:
        first = run[0]
        gap = p.start - run[-1].end
        ok = gap <= eps_t and abs(p.score - first.score) <= cfg.eps_s
        if ok:
            for key, value in p.attrs.items():
                ref = first.attrs.get(key)
                if isinstance(value, (int, float)) and isinstance(ref, (int, float)):
                    if abs(value - ref) > cfg.eps_a.get(key, 0.0):
                        ok = False
                        break
                elif value != ref:
                    ok = False
                    break
        if ok:
            run.append(p)
        else:
            events.append(_merge_run(run))
            run = [p]
    events.append(_merge_run(run))
    return events


def _merge_run(run: list) -> Event:
    score = sum(p.score for p in run) / len(run)
    attrs = {}
    for key, first_value in run[0].attrs.items():
        if isinstance(first_value, (int, float)):
            attrs[key] = sum(p.attrs[key] for p in run) / len(run)
        else:
            attrs[key] = first_value
    return Event(
        Interval(run[0].start, run[-1].end),
        EventPayload(score=min(1.0, max(0.0, score)), attrs=attrs),
    )


def parse_timestamp(raw: str, row: int) -> int:
    """ISO-8601 or decimal epoch seconds -> ticks, round-half-even."""
    raw = raw.strip()
    try:
        seconds = Decimal(raw)
    except InvalidOperation:
        try:
            dt = datetime.fromisoformat(raw)
        except ValueError:
            raise BadTimestamp(row, raw)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        seconds = Decimal(dt.timestamp()).quantize(Decimal("0.000001"))
    micros = (seconds * US_PER_SECOND).to_integral_value(rounding=ROUND_HALF_EVEN)
    return int(micros)


def import_csv(
    data: bytes,
    kind: str,
    id: TrackId,
    cfg: Optional[CompressionConfig] = None,
) -> Track:
    """Build a track from a CSV file.

    Required columns: start, end. Optional: score, label, and any number
    of "attr:<name>" columns. Classifier rows run through compress();
    label/protocol rows through normalize(reject).
    """
    text = data.decode("utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise MissingColumn("empty file, header required")
    fields = [f.strip() for f in reader.fieldnames]
    for required in ("start", "end"):
        if required not in fields:
            raise MissingColumn(f"required column {required!r} missing")
    known = {"start", "end", "score", "label"}
    attr_cols = {}
    for f in fields:
        if f in known:
            continue
        if f.startswith("attr:") and len(f) > 5:
            attr_cols[f] = f[5:]
        else:
            raise UnexpectedColumn(f"column {f!r} (attributes need the 'attr:' prefix)")

    rows = []
    for i, row in enumerate(reader, start=2):
        start = parse_timestamp(row["start"], i)
        end = parse_timestamp(row["end"], i)
        attrs = {}
        for col, name in attr_cols.items():
            value = (row.get(col) or "").strip()
            if not value:
                continue
            try:
                attrs[name] = float(value)
            except ValueError:
                attrs[name] = value
        if kind == "classifier":
            if "score" not in fields:
                raise MissingColumn("classifier CSV needs a 'score' column")
            rows.append(RawPrediction(Interval(start, end), float(row["score"]), attrs))
        else:
            label = (row.get("label") or "").strip()
            if not label:
                raise MissingColumn(f"row {i}: {kind} CSV needs a nonempty 'label'")
            rows.append(
                Event(Interval(start, end), EventPayload(label=label, attrs=attrs))
            )

    if kind == "classifier":
        rows.sort(key=lambda p: (p.start, p.end))
        events = compress(rows, cfg)
    else:
        events = normalize(rows, "reject")
    return Track(id=id, kind=kind, events=events)
