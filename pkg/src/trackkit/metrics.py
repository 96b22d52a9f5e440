"""Performance metrics over tracks: Jaccard, container-track report,
ROC/AUC, and the event-level match score.

Every scalar comes from exact integer tick durations; 0/0 cases surface
as None ("undefined") rather than a silent 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import algebra
from .algebra import IntervalSet, intersect, negate, subtract, to_interval_set, union
from .errors import DegenerateTruth
from .model import Interval, Track


@dataclass(frozen=True)
class ContainerTrack:
    """Spatialized metric: denominator intervals with a numerator fill.

    Non-filled (denominator minus numerator) regions localize the
    mispredictions that drag this metric down.
    """

    metric_name: str
    denominator: IntervalSet
    numerator: IntervalSet
    value: Optional[float]

    def __post_init__(self):
        if not self.denominator.covers(self.numerator):
            raise ValueError(f"{self.metric_name}: numerator not within denominator")

    def unfilled(self) -> IntervalSet:
        return subtract(self.denominator, self.numerator)


@dataclass(frozen=True)
class RocCurve:
    points: tuple  # (fpr, tpr, theta), fpr ascending
    auc: float


@dataclass(frozen=True)
class EventScore:
    detected: int
    total: int

    @property
    def score(self) -> float:
        return 1.0 if self.total == 0 else self.detected / self.total


@dataclass(frozen=True)
class Report:
    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    containers: dict  # metric name -> ContainerTrack


def _ratio(num: int, den: int) -> Optional[float]:
    return None if den == 0 else num / den


def jaccard(a, b) -> float:
    """Intersection-over-union of covered duration."""
    a, b = to_interval_set(a), to_interval_set(b)
    if a.is_empty() and b.is_empty():
        return 1.0
    inter = intersect(a, b).duration()
    uni = union(a, b).duration()
    return inter / uni


def report(p, g, domain: Interval) -> Report:
    """Accuracy, precision, recall, F1 as scalars plus container tracks.

    p is the prediction operand (auto-thresholded if classifier), g the
    ground-truth label operand; accuracy is measured over `domain`.
    """
    p = to_interval_set(p)
    g = to_interval_set(g)
    dom = IntervalSet.of([(domain.start, domain.end)])
    p, g = intersect(p, dom), intersect(g, dom)

    tp = intersect(p, g)
    not_p = negate(p, domain)
    not_g = negate(g, domain)
    tn = intersect(not_p, not_g)
    correct = union(tp, tn)
    p_or_g = union(p, g)

    tp_d, p_d, g_d = tp.duration(), p.duration(), g.duration()
    dom_d = domain.length

    precision = _ratio(tp_d, p_d)
    recall = _ratio(tp_d, g_d)
    accuracy = _ratio(tp_d + tn.duration(), dom_d)
    # 2PR/(P+R) reduces to 2|TP| / (|P| + |G|), defined whenever P or G is nonempty
    f1 = _ratio(2 * tp_d, p_d + g_d)

    containers = {
        "precision": ContainerTrack("precision", denominator=p, numerator=tp, value=precision),
        "recall": ContainerTrack("recall", denominator=g, numerator=tp, value=recall),
        "accuracy": ContainerTrack("accuracy", denominator=dom, numerator=correct, value=accuracy),
        # F1's denominator duration is |P|+|G|-|TP|; value derives exactly from
        # the same integer durations via f1 = 2n/(n+d).
        "f1": ContainerTrack("f1", denominator=p_or_g, numerator=tp, value=f1),
    }
    return Report(accuracy=accuracy, precision=precision, recall=recall, f1=f1,
                  containers=containers)


def roc(c: Track, g, domain: Interval) -> RocCurve:
    """Threshold sweep over the classifier's distinct scores.

    tpr = |P_theta AND G| / |G|, fpr = |P_theta AND NOT G| / |NOT G|;
    AUC by the trapezoid rule over fpr. Endpoints (0,0) and (1,1) are
    always included.
    """
    if c.kind != "classifier":
        from .errors import NotAClassifierTrack

        raise NotAClassifierTrack(f"{c.canonical_id} is a {c.kind} track")
    g = to_interval_set(g)
    dom = IntervalSet.of([(domain.start, domain.end)])
    g = intersect(g, dom)
    not_g = negate(g, domain)
    g_d, ng_d = g.duration(), not_g.duration()
    if g_d == 0 or ng_d == 0:
        raise DegenerateTruth("ground truth is empty or covers the whole domain")

    # Events of a track are disjoint, so the durations behind tpr/fpr are
    # additive per event; sweep scores descending and accumulate.
    per_event = []
    for ev in c.events:
        if ev.score is None:
            continue
        span = IntervalSet.of([(max(ev.start, domain.start), min(ev.end, domain.end))]
                              if ev.start < domain.end and ev.end > domain.start else [])
        per_event.append((ev.score,
                          intersect(span, g).duration(),
                          intersect(span, not_g).duration()))
    per_event.sort(key=lambda x: -x[0])

    points = [(0.0, 0.0, float("inf"))]
    tp = fp = 0
    i = 0
    while i < len(per_event):
        theta = per_event[i][0]
        while i < len(per_event) and per_event[i][0] == theta:
            tp += per_event[i][1]
            fp += per_event[i][2]
            i += 1
        points.append((fp / ng_d, tp / g_d, theta))
    if points[-1][:2] != (1.0, 1.0):
        points.append((1.0, 1.0, float("-inf")))
    points.sort(key=lambda pt: (pt[0], pt[1]))

    auc = 0.0
    for (f0, t0, _), (f1_, t1, _) in zip(points, points[1:]):
        auc += (f1_ - f0) * (t0 + t1) / 2.0
    return RocCurve(points=tuple(points), auc=auc)


def event_score(p, g: Track) -> EventScore:
    """Fraction of ground-truth events overlapped by any prediction."""
    p_set = to_interval_set(p)
    total = len(g.events)
    detected = sum(1 for ev in g.events if p_set.overlaps_span(ev.start, ev.end))
    return EventScore(detected=detected, total=total)
