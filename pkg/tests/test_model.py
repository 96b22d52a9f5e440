import pytest
from hypothesis import given, strategies as st

from trackkit.errors import InvalidInterval, OverlapError, TrackIdParseError
from trackkit.model import (
    Event,
    EventPayload,
    Interval,
    Track,
    TrackId,
    duration,
    normalize,
)

from conftest import make_events, make_track


class TestInterval:
    def test_positive_duration_required(self):
        with pytest.raises(InvalidInterval):
            Interval(10, 10)
        with pytest.raises(InvalidInterval):
            Interval(10, 5)

    def test_half_open_semantics(self):
        a, b = Interval(0, 5), Interval(5, 9)
        assert not a.overlaps(b)
        assert a.contains(0) and not a.contains(5)


class TestNormalize:
    def test_already_canonical_reject(self):
        events = make_events([(0, 10), (10, 20)])
        assert normalize(events, "reject") == events

    def test_reject_raises_with_offending_pair(self):
        events = make_events([(0, 10), (5, 15)])
        with pytest.raises(OverlapError) as ei:
            normalize(events, "reject")
        assert ei.value.first.start == 0
        assert ei.value.second.start == 5

    def test_merge_max_score(self):
        # oracle: 1-tick union with per-tick max score
        events = make_events([(0, 10), (5, 15)], scores=[0.4, 0.9])
        merged = normalize(events, "merge_max_score")
        assert len(merged) == 1
        assert (merged[0].start, merged[0].end) == (0, 15)
        assert merged[0].score == 0.9

    def test_merge_keeps_first_label(self):
        events = make_events([(0, 10), (5, 15)], labels=["a", "b"])
        merged = normalize(events, "merge_max_score")
        assert merged[0].label == "a"

    def test_merge_does_not_join_touching(self):
        events = make_events([(0, 10), (10, 20)], score=0.5)
        assert len(normalize(events, "merge_max_score")) == 2

    def test_clip_truncates_and_drops(self):
        events = make_events([(0, 10), (5, 15), (6, 9)])
        clipped = normalize(events, "clip")
        assert [(e.start, e.end) for e in clipped] == [(0, 10), (10, 15)]

    @pytest.mark.parametrize("policy", ["reject", "merge_max_score", "clip"])
    def test_idempotent(self, rng, policy):
        for _ in range(50):
            spans = sorted(
                (rng.randrange(0, 1000), rng.randrange(0, 1000)) for _ in range(10)
            )
            spans = [(s, e) for s, e in spans if s < e]
            events = make_events(spans, score=0.5)
            if policy == "reject":
                try:
                    once = normalize(events, policy)
                except OverlapError:
                    continue
            else:
                once = normalize(events, policy)
            assert normalize(once, policy) == once


class TestDuration:
    def test_empty(self):
        assert duration([]) == 0

    def test_sum(self):
        assert duration(make_events([(0, 10), (20, 25)])) == 15

    def test_matches_tick_count(self, rng):
        import numpy as np

        from oracle import rasterize

        spans = [(0, 10), (12, 40), (100, 101)]
        assert duration(make_events(spans)) == int(rasterize(spans, (0, 200)).sum())

    def test_bounded_by_span(self):
        t = make_track([(5, 10), (20, 30)])
        assert duration(t) <= t.span().length


class TestTrackInvariants:
    def test_classifier_requires_score(self):
        with pytest.raises(ValueError):
            make_track([(0, 10)], kind="classifier", score=None)

    def test_label_requires_label(self):
        with pytest.raises(ValueError):
            make_track([(0, 10)], kind="label", label=None)

    def test_protocol_unique_labels(self):
        from trackkit.errors import ProtocolDuplicateLabel

        with pytest.raises(ProtocolDuplicateLabel):
            make_track([(0, 10), (20, 30)], kind="protocol", labels=["walk", "walk"])

    def test_overlapping_events_rejected(self):
        with pytest.raises(OverlapError):
            make_track([(0, 10), (5, 15)])

    def test_threshold_only_on_classifiers(self):
        c = make_track([(0, 10)], kind="classifier")
        assert c.meta.threshold == 0.5
        lbl = make_track([(0, 10)], kind="label")
        assert lbl.meta.threshold is None


class TestTrackId:
    def test_canonical_concatenation(self):
        assert TrackId("Sleeping", "John", "1.0").canonical() == "SleepingJohn1.0"

    def test_round_trip_with_author_registry(self):
        tid = TrackId.parse("SleepingJohn1.0", authors={"John", "Erhan"})
        assert tid == TrackId("Sleeping", "John", "1.0")

    def test_unknown_author(self):
        with pytest.raises(TrackIdParseError):
            TrackId.parse("SleepingJohn1.0", authors={"Mary"})

    def test_ambiguous_author(self):
        with pytest.raises(TrackIdParseError):
            TrackId.parse("TurnErhan1.2", authors={"Erhan", "nErhan"})

    @given(
        st.from_regex(r"[A-Z][a-z]{1,8}", fullmatch=True),
        st.from_regex(r"[A-Z][a-z]{1,8}", fullmatch=True),
        st.lists(st.integers(0, 20), min_size=1, max_size=3),
    )
    def test_round_trip_property(self, class_label, author, version_parts):
        version = ".".join(str(p) for p in version_parts)
        tid = TrackId(class_label, author, version)
        parsed = TrackId.parse(tid.canonical(), authors={author})
        assert parsed == tid


class TestPayload:
    def test_score_range(self):
        with pytest.raises(ValueError):
            EventPayload(score=1.5)

    def test_attr_keys_are_identifiers(self):
        with pytest.raises(ValueError):
            EventPayload(attrs={"": 1})
        with pytest.raises(ValueError):
            EventPayload(attrs={"attr name": 1})
        EventPayload(attrs={"tremor_frequency": 4.2})
