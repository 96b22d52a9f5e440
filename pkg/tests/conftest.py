import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from trackkit.model import (
    Event,
    EventPayload,
    Interval,
    Session,
    Track,
    TrackId,
    TrackMeta,
)


def make_events(spans, *, score=None, label=None, scores=None, labels=None, attrs=None):
    out = []
    for i, (s, e) in enumerate(spans):
        out.append(
            Event(
                Interval(s, e),
                EventPayload(
                    score=scores[i] if scores else score,
                    label=labels[i] if labels else label,
                    attrs=attrs or {},
                ),
            )
        )
    return out


def make_track(spans, kind="label", class_label="Walking", author="John",
               version="1.0", threshold=None, **event_kw):
    if kind == "label" and "label" not in event_kw and "labels" not in event_kw:
        event_kw["label"] = class_label
    if kind == "classifier" and "score" not in event_kw and "scores" not in event_kw:
        event_kw["score"] = 0.8
    meta = TrackMeta(threshold=threshold) if threshold is not None else TrackMeta()
    return Track(
        id=TrackId(class_label, author, version),
        kind=kind,
        events=make_events(spans, **event_kw),
        meta=meta,
    )


def random_spans(rng: random.Random, max_events=50, max_tick=1_000_000):
    n = rng.randint(0, max_events)
    cuts = sorted(rng.sample(range(max_tick), min(2 * n, max_tick)))
    spans = []
    for i in range(0, len(cuts) - 1, 2):
        if cuts[i] < cuts[i + 1]:
            spans.append((cuts[i], cuts[i + 1]))
    return spans


@pytest.fixture
def rng():
    return random.Random(20260823)


@pytest.fixture
def session():
    s = Session(domain=Interval(0, 1_000_000))
    return s
