"""Exception types shared across the toolkit."""


class RlfkitError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(RlfkitError):
    """A bundle or report document is malformed."""


class MissingViewport(SchemaError):
    """A width inside the declared range has no geometry record."""


class DuplicateXPath(SchemaError):
    """The DOM document contains the same xpath twice."""


class UnknownXPath(RlfkitError):
    """An xpath was requested that does not exist in the bundle."""


class UnsampledWidth(RlfkitError):
    """A viewport width was requested that the bundle did not sample."""


class DimensionMismatch(RlfkitError):
    """The two rasters of a region pair have different dimensions."""


class EmptyCandidateSet(RlfkitError):
    """Localization produced no candidates; the failure is not localizable."""


class CaptureUnavailable(RlfkitError):
    """A re-capture was requested but no capture backend is available."""


class BridgeMissing(CaptureUnavailable):
    """The browser capture bridge is not installed or not on PATH."""
