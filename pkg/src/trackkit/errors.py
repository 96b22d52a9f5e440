"""Exception hierarchy shared across the package."""


class TrackKitError(Exception):
    """Base class for all errors raised by trackkit."""

    code = "error"


# -- core model ---------------------------------------------------------

class InvalidInterval(TrackKitError):
    code = "invalid_interval"


class OverlapError(TrackKitError):
    """Raised by normalize(policy=reject); carries the first offending pair."""

    code = "overlap"

    def __init__(self, first, second):
        self.first = first
        self.second = second
        super().__init__(f"overlapping events: {first} and {second}")


class ProtocolDuplicateLabel(TrackKitError):
    code = "protocol_duplicate_label"


class TrackIdParseError(TrackKitError):
    code = "bad_track_id"


# -- ingest -------------------------------------------------------------

class UnsortedStream(TrackKitError):
    code = "unsorted_stream"


class OverlappingPredictions(TrackKitError):
    code = "overlapping_predictions"


class MissingColumn(TrackKitError):
    code = "missing_column"


class UnexpectedColumn(TrackKitError):
    code = "unexpected_column"


class BadTimestamp(TrackKitError):
    code = "bad_timestamp"

    def __init__(self, row, value):
        self.row = row
        self.value = value
        super().__init__(f"row {row}: cannot parse timestamp {value!r}")


# -- algebra ------------------------------------------------------------

class NotAClassifierTrack(TrackKitError):
    code = "not_a_classifier"


class OutOfDomain(TrackKitError):
    code = "out_of_domain"


class NoPredecessorVersion(TrackKitError):
    code = "no_predecessor"


# -- metrics ------------------------------------------------------------

class DegenerateTruth(TrackKitError):
    code = "degenerate_truth"


# -- command language ---------------------------------------------------

class UnknownOperator(TrackKitError):
    code = "unknown_operator"


class ArityError(TrackKitError):
    code = "arity"


class FilterSyntaxError(TrackKitError):
    code = "filter_syntax"

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class NoMatch(TrackKitError):
    code = "no_match"


class AmbiguousRef(TrackKitError):
    code = "ambiguous_ref"

    def __init__(self, raw, candidates):
        self.raw = raw
        self.candidates = list(candidates)
        super().__init__(f"{raw!r} matches multiple tracks: {self.candidates}")


class TypeMismatch(TrackKitError):
    code = "type_mismatch"


class NoCursor(TrackKitError):
    code = "no_cursor"


# -- store / service ----------------------------------------------------

class BadMagic(TrackKitError):
    code = "bad_magic"


class SchemaVersionUnsupported(TrackKitError):
    code = "schema_version"


class InvariantViolation(TrackKitError):
    code = "invariant_violation"

    def __init__(self, track_id, message):
        self.track_id = track_id
        super().__init__(f"track {track_id}: {message}")


class BadVersionString(TrackKitError):
    code = "bad_version"


class NoVideoBound(TrackKitError):
    code = "no_video"


class SessionNotFound(TrackKitError):
    code = "session_not_found"
