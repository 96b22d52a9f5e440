"""trackkit: analyze, compose, and compare temporal classifier predictions
against ground-truth label tracks."""

from .model import (
    Event,
    EventPayload,
    Interval,
    ModelMeta,
    Session,
    Track,
    TrackId,
    TrackMeta,
    VideoBinding,
    duration,
    normalize,
)
from .algebra import (
    DiffTrack,
    IntervalSet,
    intersect,
    match_subtract,
    negate,
    subtract,
    sym_diff,
    threshold_intervals,
    union,
    variation,
)
from .ingest import CompressionConfig, RawPrediction, compress, import_csv
from .metrics import ContainerTrack, EventScore, RocCurve, event_score, jaccard, report, roc
from .commands import CommandAST, autocomplete, execute, parse, resolve, smart_order
from .store import Playlist, RenderBuffer, bin_events, bsx_read, bsx_write, load_manifest, playlist

__version__ = "0.1.0"
