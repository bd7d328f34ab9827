"""Exception hierarchy shared across the package."""


class BoxLabError(Exception):
    """Base class for all domain errors raised by boxlab."""


class InvalidBoxError(BoxLabError, ValueError):
    """A box violates its invariants (non-positive dims, non-finite fields, ...)."""


class InvalidPairError(BoxLabError, ValueError):
    """Two boxes cannot be interpolated (track or class mismatch)."""


class OrderingError(BoxLabError, ValueError):
    """A frame range was given with start >= end."""


class InsufficientPointsError(BoxLabError, ValueError):
    """Too few points for the requested fit."""


class NoPlaneFoundError(BoxLabError, RuntimeError):
    """RANSAC found no candidate plane with enough inliers."""


class ManifestError(BoxLabError, ValueError):
    """A sequence manifest could not be loaded.

    ``category`` is one of ``missing-file``, ``malformed`` or ``invariant``;
    ``field`` names the offending entry when one can be identified.
    """

    def __init__(self, category: str, message: str, field: str = ""):
        super().__init__(message)
        self.category = category
        self.field = field


class PointCloudError(BoxLabError, ValueError):
    """A point-cloud payload is truncated or contains invalid values."""


class SchemaError(BoxLabError, ValueError):
    """An annotation document violates the interchange schema."""


class MissingAnnotationError(BoxLabError, KeyError):
    """No annotation exists for the requested (frame, track)."""


class MissingKeyframeError(BoxLabError, ValueError):
    """A frame used as an interpolation endpoint is not a keyframe."""


class FrameRangeError(BoxLabError, ValueError):
    """A frame index lies outside the sequence."""


class UnknownTrackError(BoxLabError, ValueError):
    """A track id was referenced that the store never assigned."""


class SequenceMismatchError(BoxLabError, ValueError):
    """Two annotation files refer to different sequences."""
