"""Core domain model: ticks, intervals, events, tracks, sessions.

All timestamps are integer microseconds ("ticks") relative to the session
epoch, so interval arithmetic is exact and deterministic. Intervals are
half-open [start, end) with strictly positive duration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Union

from .errors import (
    InvalidInterval,
    OverlapError,
    ProtocolDuplicateLabel,
    TrackIdParseError,
)

US_PER_SECOND = 1_000_000

TRACK_KINDS = frozenset({"classifier", "label", "protocol", "container", "diff"})

_IDENT_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_VERSION_SUFFIX_RE = re.compile(r"([0-9]+(?:\.[0-9]+)*)$")


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open tick interval [start, end), end > start."""

    start: int
    end: int

    def __post_init__(self):
        if not (isinstance(self.start, int) and isinstance(self.end, int)):
            raise InvalidInterval(f"ticks must be integers: [{self.start}, {self.end})")
        if self.end <= self.start:
            raise InvalidInterval(f"empty or inverted interval [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Interval") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, tick: int) -> bool:
        return self.start <= tick < self.end


@dataclass(frozen=True)
class EventPayload:
    score: Optional[float] = None
    label: Optional[str] = None
    attrs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.score is not None and not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score out of [0,1]: {self.score}")
        for key in self.attrs:
            if not _IDENT_RE.match(key):
                raise ValueError(f"attribute key is not an identifier: {key!r}")


@dataclass(frozen=True)
class Event:
    interval: Interval
    payload: EventPayload = field(default_factory=EventPayload)

    @property
    def start(self) -> int:
        return self.interval.start

    @property
    def end(self) -> int:
        return self.interval.end

    @property
    def score(self) -> Optional[float]:
        return self.payload.score

    @property
    def label(self) -> Optional[str]:
        return self.payload.label

    @property
    def attrs(self) -> dict:
        return self.payload.attrs

    @property
    def duration_seconds(self) -> float:
        return self.interval.length / US_PER_SECOND


@dataclass(frozen=True)
class TrackId:
    class_label: str
    author: str
    version: str

    def canonical(self) -> str:
        # No separators by design: "Sleeping" + "John" + "1.0" -> "SleepingJohn1.0"
        return f"{self.class_label}{self.author}{self.version}"

    def __str__(self) -> str:
        return self.canonical()

    @classmethod
    def parse(cls, text: str, authors: Iterable[str]) -> "TrackId":
        """Recover (class_label, author, version) from the concatenated form.

        The concatenation is ambiguous in general, so a registry of known
        authors is required; exactly one author must fit.
        """
        m = _VERSION_SUFFIX_RE.search(text)
        if not m or m.start() == 0:
            raise TrackIdParseError(f"no version suffix in {text!r}")
        version = m.group(1)
        head = text[: m.start()]
        fits = [a for a in set(authors) if head.endswith(a) and len(a) < len(head)]
        if not fits:
            raise TrackIdParseError(f"no known author matches {text!r}")
        if len(fits) > 1:
            raise TrackIdParseError(f"ambiguous author in {text!r}: {sorted(fits)}")
        author = fits[0]
        return cls(class_label=head[: -len(author)], author=author, version=version)


def version_key(version: str):
    """Dotted-numeric sort key: '1.10' is newer than '1.2'."""
    try:
        return tuple(int(part) for part in version.split("."))
    except ValueError:
        from .errors import BadVersionString

        raise BadVersionString(f"not a dotted-numeric version: {version!r}")


@dataclass(frozen=True)
class ModelMeta:
    sensors: tuple = ()
    window_seconds: float = 0.0
    params: dict = field(default_factory=dict)
    commit_hash: str = ""
    commit_message: str = ""
    committed_at: str = ""

    def __post_init__(self):
        if self.commit_hash and not re.fullmatch(r"[0-9a-fA-F]+", self.commit_hash):
            raise ValueError(f"commit_hash must be hex or empty: {self.commit_hash!r}")


@dataclass
class TrackMeta:
    display_name: str = ""
    color: tuple = (70, 130, 180)
    visible: bool = True
    render_mode: str = "blocks"
    threshold: Optional[float] = None
    model: Optional[ModelMeta] = None


@dataclass
class Track:
    id: TrackId
    kind: str
    events: list
    meta: TrackMeta = field(default_factory=TrackMeta)

    def __post_init__(self):
        if self.kind not in TRACK_KINDS:
            raise ValueError(f"unknown track kind {self.kind!r}")
        if self.kind == "classifier" and self.meta.threshold is None:
            self.meta.threshold = 0.5
        if self.kind != "classifier":
            self.meta.threshold = None
        if not self.meta.display_name:
            self.meta.display_name = self.id.canonical()
        self.validate()

    def validate(self):
        prev = None
        seen_labels = set()
        for ev in self.events:
            if prev is not None:
                if ev.start < prev.start:
                    raise InvalidInterval(f"events not sorted in {self.id}")
                if ev.start < prev.end:
                    raise OverlapError(prev, ev)
            if self.kind == "classifier" and ev.score is None:
                raise ValueError(f"classifier event without score in {self.id}")
            if self.kind in ("label", "protocol") and ev.label is None:
                raise ValueError(f"{self.kind} event without label in {self.id}")
            if self.kind == "protocol":
                if ev.label in seen_labels:
                    raise ProtocolDuplicateLabel(f"duplicate label {ev.label!r} in {self.id}")
                seen_labels.add(ev.label)
            prev = ev

    @property
    def canonical_id(self) -> str:
        return self.id.canonical()

    def span(self) -> Optional[Interval]:
        if not self.events:
            return None
        return Interval(self.events[0].start, self.events[-1].end)


@dataclass
class VideoBinding:
    uri: str
    offset: int = 0  # tick of video time zero


@dataclass
class Session:
    domain: Interval
    tracks: list = field(default_factory=list)
    cursor: Optional[int] = None
    video: Optional[VideoBinding] = None
    promoted: list = field(default_factory=list)  # smart-order memory (TrackIds)
    extra: dict = field(default_factory=dict)  # unknown fields preserved by the store

    def authors(self) -> set:
        return {t.id.author for t in self.tracks}

    def get(self, canonical: str) -> Optional[Track]:
        for t in self.tracks:
            if t.canonical_id == canonical:
                return t
        return None

    def add(self, track: Track):
        if self.get(track.canonical_id) is not None:
            raise ValueError(f"duplicate track id {track.canonical_id}")
        span = track.span()
        if span is not None and not (
            self.domain.start <= span.start and span.end <= self.domain.end
        ):
            self.domain = Interval(
                min(self.domain.start, span.start), max(self.domain.end, span.end)
            )
        self.tracks.append(track)

    def display_order(self) -> list:
        return [t.id for t in self.tracks]


def normalize(events: list, policy: str = "reject") -> list:
    """Canonicalize an event sequence: sorted, strictly non-overlapping.

    reject          -> OverlapError on the first overlapping pair
    merge_max_score -> union overlapping chains, keep max score + first label
    clip            -> truncate the later event's start, drop it if emptied
    """
    if policy not in ("reject", "merge_max_score", "clip"):
        raise ValueError(f"unknown policy {policy!r}")
    ordered = sorted(events, key=lambda e: (e.start, e.end))
    if policy == "reject":
        for a, b in zip(ordered, ordered[1:]):
            if b.start < a.end:
                raise OverlapError(a, b)
        return ordered

    if policy == "merge_max_score":
        out = []
        for ev in ordered:
            if out and ev.start < out[-1].end:
                prev = out[-1]
                scores = [s for s in (prev.score, ev.score) if s is not None]
                merged = Event(
                    Interval(prev.start, max(prev.end, ev.end)),
                    EventPayload(
                        score=max(scores) if scores else None,
                        label=prev.label if prev.label is not None else ev.label,
                        attrs=prev.attrs,
                    ),
                )
                out[-1] = merged
            else:
                out.append(ev)
        return out

    # clip
    out = []
    for ev in ordered:
        if out and ev.start < out[-1].end:
            new_start = out[-1].end
            if new_start >= ev.end:
                continue  # emptied
            ev = Event(Interval(new_start, ev.end), ev.payload)
        out.append(ev)
    return out


def duration(item: Union[Track, Iterable]) -> int:
    """Total covered microseconds: sum of event/interval lengths."""
    if isinstance(item, Track):
        seq = item.events
    else:
        seq = item
    total = 0
    for x in seq:
        if isinstance(x, Event):
            total += x.interval.length
        elif isinstance(x, Interval):
            total += x.length
        else:  # (start, end) tuple
            total += x[1] - x[0]
    return total
