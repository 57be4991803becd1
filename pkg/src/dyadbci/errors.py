"""Exception types shared across the package.

Every error that callers are expected to handle programmatically gets its
own class so tests and pipelines can discriminate failure modes without
string matching.  All of them subclass ValueError: anything here means the
inputs (not the environment) were wrong.
"""


class InvalidBandError(ValueError):
    """Frequency band is malformed or contradicts a named band definition."""


class InsufficientSamplesError(ValueError):
    """Input series is too short for the requested filter or transform."""


class InvalidRateError(ValueError):
    """Sample rate is non-positive or incompatible with the operation."""


class UnsupportedRatioError(ValueError):
    """Downsampling ratio is not a positive integer factor."""


class TruncatedTrialError(ValueError):
    """A trial onset does not leave room for a full epoch."""


class IncompleteMontageError(ValueError):
    """A required electrode is missing from the recording."""


class AlignmentError(ValueError):
    """Two epoch collections do not share identical trial indices."""


class EmptyResultError(ValueError):
    """The requested windowing produces no complete windows."""


class SampleSizeError(ValueError):
    """Too few observations for the requested test."""


class EmptyGroupError(ValueError):
    """A test group is empty or there are too few groups."""


class DegenerateTestError(ValueError):
    """Test statistic is undefined (zero-variance differences)."""


class DegenerateFeatureError(ValueError):
    """A feature is undefined for the given window (zero power)."""


class DegenerateLabelError(ValueError):
    """Training labels collapse to a single class."""


class FoldError(ValueError):
    """Stratified folds cannot be built from the given labels."""


class DisconnectedGraphError(ValueError):
    """Metric requires a connected graph."""


class NoThresholdError(ValueError):
    """No threshold keeps the graph connected."""


class PairingError(ValueError):
    """Paired comparison inputs do not cover the same subjects."""


class ProtocolError(ValueError):
    """A wire frame violates the message protocol."""
