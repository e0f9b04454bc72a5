"""Exception hierarchy. Anything raised on bad data derives from FluidError."""


class FluidError(Exception):
    """Base class for data and configuration errors (CLI exit code 2)."""


class StreamAborted(FluidError):
    """Unrecoverable I/O failure while reading an input stream."""


class UnknownPreset(FluidError):
    """Requested index model preset does not exist."""


class InapplicableHeight(FluidError):
    """The model has no height-0 structure (no type component)."""


class MissingCliques(FluidError):
    """A related-properties model was summarized without clique state."""


class EmptySources(FluidError):
    """An element was recorded without any data source."""


class IndexFormatError(FluidError):
    """A persisted index directory is malformed or inconsistent."""


class EmptyIndex(FluidError):
    """Query generation was asked to sample from an empty index."""


class IncompatibleModel(FluidError):
    """A query was executed against an index of a different model family."""


class EmptyGold(FluidError):
    """An evaluation pair had an empty gold answer set."""


class DegenerateInput(FluidError):
    """Correlation input too short or without variance."""


class QueryGenerationError(FluidError):
    """The model cannot support the requested query kind."""
