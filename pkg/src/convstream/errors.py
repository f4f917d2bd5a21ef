"""Exception hierarchy shared across the engine."""


class ConvstreamError(Exception):
    """Base class for all engine errors."""


class BufferOverflowError(ConvstreamError):
    """Write into a full ring buffer. Indicates a scheduling bug: a stage
    failed to consume its window before the next sample arrived."""


class BufferUnderflowError(ConvstreamError):
    """Stride discard larger than the buffer's current occupancy."""


class ShapeError(ConvstreamError):
    """Sample or array dimensions do not match the declared layer shapes."""


class SequenceOverrunError(ConvstreamError):
    """More samples pushed than the network's expected sequence length."""


class IncompleteSequenceError(ConvstreamError):
    """Classification requested before the full sequence was streamed."""


class ParseError(ConvstreamError):
    """Malformed input document (model file, profile file, CSV cell)."""


class ValidationError(ConvstreamError):
    """Well-formed document that violates the format rules or shape chain."""


class ConfigError(ConvstreamError):
    """Invalid runtime configuration (rates, counts, layer spec strings)."""


class EmptyTraceError(ConvstreamError):
    """Histogram or analysis requested on a trace with no interval records."""
