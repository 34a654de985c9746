"""Exception types shared across the package."""


class BirdboxError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(BirdboxError):
    """Malformed media container. Carries the byte offset of the failure."""

    def __init__(self, message, byte_offset=None):
        self.byte_offset = byte_offset
        if byte_offset is not None:
            message = f"{message} (byte offset {byte_offset})"
        super().__init__(message)


class EmptyInputError(BirdboxError):
    """Input contained no usable payload (e.g. zero-length audio)."""


class ConfigurationError(BirdboxError):
    """Invalid configuration value or inconsistent component wiring."""


class PreconditionError(BirdboxError):
    """An operation was called with input violating its stated contract."""


class IngestError(BirdboxError):
    """Manifest ingestion failed (duplicate ids, unparseable records)."""


class UndefinedMetricError(BirdboxError):
    """A metric has no defined value for the given inputs (e.g. empty set)."""


class LogCorruptionError(BirdboxError):
    """Persistence log corrupt before its final line."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"{message} (line {line_number})"
        super().__init__(message)


class BackendError(BirdboxError):
    """A model backend failed or violated its output contract."""
