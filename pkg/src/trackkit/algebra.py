"""Boolean track algebra over canonical interval sets.

Intervals are half-open integer tick ranges, so touching intervals
([0,5) and [5,9)) always canonicalize to a single interval and the
canonical form is unique for a given covered point set.

Binary operators accept tracks or interval sets; classifier tracks are
converted automatically by thresholding at their current threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import NoPredecessorVersion, NotAClassifierTrack, OutOfDomain
from .model import (
    Event,
    EventPayload,
    Interval,
    Track,
    TrackId,
    version_key,
)

Span = tuple  # (start, end) integer pair


def canonical(spans: Iterable) -> list:
    """Sort, drop empties, merge overlapping and touching spans."""
    if isinstance(spans, (list, tuple)) and all(type(x) is tuple for x in spans):
        pairs = sorted(x for x in spans if x[1] > x[0])
    else:
        pairs = sorted((int(s), int(e)) for s, e in _as_pairs(spans) if e > s)
    out = []
    for s, e in pairs:
        if out and s <= out[-1][1]:
            if e > out[-1][1]:
                out[-1] = (out[-1][0], e)
        else:
            out.append((s, e))
    return out


def _as_pairs(spans):
    for x in spans:
        if isinstance(x, Interval):
            yield (x.start, x.end)
        elif isinstance(x, Event):
            yield (x.start, x.end)
        else:
            yield (x[0], x[1])


@dataclass(frozen=True)
class IntervalSet:
    """Canonical (sorted, disjoint, gap-0-merged) set of tick intervals."""

    intervals: tuple = ()

    @classmethod
    def of(cls, spans: Iterable) -> "IntervalSet":
        return cls(tuple(canonical(spans)))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    def duration(self) -> int:
        return sum(e - s for s, e in self.intervals)

    def is_empty(self) -> bool:
        return not self.intervals

    def covers(self, other: "IntervalSet") -> bool:
        return subtract(other, self).is_empty()

    def overlaps_span(self, start: int, end: int) -> bool:
        # bisect on interval starts: only the predecessor of `end` can overlap
        import bisect

        idx = bisect.bisect_left(self.intervals, (end,)) - 1
        if idx < 0:
            return False
        s, e = self.intervals[idx]
        return s < end and start < e

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __contains__(self, tick: int) -> bool:
        return any(s <= tick < e for s, e in self.intervals)


@dataclass(frozen=True)
class DiffTrack:
    """Signed diff between two track versions: gained vs lost coverage."""

    added: IntervalSet
    removed: IntervalSet

    def __post_init__(self):
        if not intersect(self.added, self.removed).is_empty():
            raise ValueError("added and removed overlap")


TrackOrSet = Union[Track, IntervalSet]


def threshold_intervals(track: Track, theta: float) -> IntervalSet:
    """Intervals of classifier events with score >= theta, touching merged."""
    if track.kind != "classifier":
        raise NotAClassifierTrack(f"{track.canonical_id} is a {track.kind} track")
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"threshold out of [0,1]: {theta}")
    return IntervalSet.of(
        (ev.start, ev.end) for ev in track.events if ev.score is not None and ev.score >= theta
    )


def to_interval_set(operand: TrackOrSet, theta: Optional[float] = None) -> IntervalSet:
    """Auto-convert: classifier tracks are thresholded, others taken verbatim."""
    if isinstance(operand, IntervalSet):
        return operand
    if isinstance(operand, Track):
        if operand.kind == "classifier":
            t = theta if theta is not None else operand.meta.threshold
            return threshold_intervals(operand, t if t is not None else 0.5)
        return IntervalSet.of(operand.events)
    return IntervalSet.of(operand)


def union(a: TrackOrSet, b: TrackOrSet) -> IntervalSet:
    a, b = to_interval_set(a), to_interval_set(b)
    return IntervalSet.of(list(a.intervals) + list(b.intervals))


def intersect(a: TrackOrSet, b: TrackOrSet) -> IntervalSet:
    a, b = to_interval_set(a), to_interval_set(b)
    out = []
    i = j = 0
    ai, bi = a.intervals, b.intervals
    while i < len(ai) and j < len(bi):
        s = max(ai[i][0], bi[j][0])
        e = min(ai[i][1], bi[j][1])
        if s < e:
            out.append((s, e))
        if ai[i][1] <= bi[j][1]:
            i += 1
        else:
            j += 1
    return IntervalSet(tuple(out))


def negate(a: TrackOrSet, domain: Interval) -> IntervalSet:
    a = to_interval_set(a)
    if a.intervals:
        if a.intervals[0][0] < domain.start or a.intervals[-1][1] > domain.end:
            raise OutOfDomain(f"operand exceeds domain [{domain.start}, {domain.end})")
    out = []
    cursor = domain.start
    for s, e in a.intervals:
        if cursor < s:
            out.append((cursor, s))
        cursor = e
    if cursor < domain.end:
        out.append((cursor, domain.end))
    return IntervalSet(tuple(out))


def subtract(a: TrackOrSet, b: TrackOrSet) -> IntervalSet:
    a, b = to_interval_set(a), to_interval_set(b)
    out = []
    bi = b.intervals
    j = 0
    for s, e in a.intervals:
        cursor = s
        while j < len(bi) and bi[j][1] <= cursor:
            j += 1
        k = j
        while k < len(bi) and bi[k][0] < e:
            bs, be = bi[k]
            if cursor < bs:
                out.append((cursor, min(bs, e)))
            cursor = max(cursor, be)
            if cursor >= e:
                break
            k += 1
        if cursor < e:
            out.append((cursor, e))
    return IntervalSet.of(out)


def sym_diff(a: TrackOrSet, b: TrackOrSet) -> IntervalSet:
    """Symmetric difference: the paper's "errors" operator."""
    a, b = to_interval_set(a), to_interval_set(b)
    return union(subtract(a, b), subtract(b, a))


# Command-line name for sym_diff.
errors = sym_diff


def match_subtract(a: Union[Track, list], b: TrackOrSet) -> list:
    """Whole events of `a` with zero overlap against `b`.

    Detection-oriented variant of subtraction: an event overlapping `b`
    anywhere is dropped entirely, boundaries are never trimmed.
    """
    events = a.events if isinstance(a, Track) else list(a)
    b = to_interval_set(b)
    return [ev for ev in events if not b.overlaps_span(ev.start, ev.end)]


def find_predecessor(session, track: Track) -> Optional[Track]:
    """Highest lower version with the same class_label + author."""
    own = version_key(track.id.version)
    best = None
    for t in session.tracks:
        if t is track:
            continue
        if t.id.class_label != track.id.class_label or t.id.author != track.id.author:
            continue
        k = version_key(t.id.version)
        if k < own and (best is None or k > version_key(best.id.version)):
            best = t
    return best


def variation(new: Track, old: Optional[Track] = None, session=None) -> DiffTrack:
    """Signed set diff between two versions (after auto-thresholding)."""
    if old is None:
        if session is None:
            raise NoPredecessorVersion("no explicit operand and no session to search")
        old = find_predecessor(session, new)
        if old is None:
            raise NoPredecessorVersion(
                f"{new.canonical_id} has no predecessor version in the session"
            )
    new_set = to_interval_set(new)
    old_set = to_interval_set(old)
    return DiffTrack(added=subtract(new_set, old_set), removed=subtract(old_set, new_set))


def as_label_track(
    result: IntervalSet,
    op_name: str,
    sources: list,
    author: str = "xplorer",
    version: str = "1.0",
    label_union: bool = False,
) -> Track:
    """Materialize an algebra result as a label track.

    Each event carries attrs {src: contributing track ids}; union results
    additionally carry the union of overlapping source labels.
    """
    src_ids = [t.canonical_id for t in sources]
    spans = result.intervals
    contributing = [[] for _ in spans]
    labels = [[] for _ in spans]
    # one merge sweep per source: sorted events vs sorted result intervals
    for t in sources:
        i = 0
        hit = [False] * len(spans)
        for ev in t.events:
            while i < len(spans) and spans[i][1] <= ev.start:
                i += 1
            j = i
            while j < len(spans) and spans[j][0] < ev.end:
                hit[j] = True
                if label_union and ev.label and ev.label not in labels[j]:
                    labels[j].append(ev.label)
                j += 1
        for k, h in enumerate(hit):
            if h:
                contributing[k].append(t.canonical_id)
    events = [
        Event(
            Interval(s, e),
            EventPayload(
                label="+".join(labels[k]) if labels[k] else op_name,
                attrs={"src": ",".join(contributing[k] or src_ids)},
            ),
        )
        for k, (s, e) in enumerate(spans)
    ]
    operand_ids = ",".join(src_ids)
    tid = TrackId(class_label=f"{op_name}({operand_ids})", author=author, version=version)
    return Track(id=tid, kind="label", events=events)
