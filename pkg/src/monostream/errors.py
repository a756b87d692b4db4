"""Exception types shared across the toolkit."""


class MonostreamError(Exception):
    """Base class for all toolkit errors."""


class FormatError(MonostreamError):
    """A file or record does not conform to its wire format.

    Carries enough context (source name, line number, action index) to point
    at the offending input.
    """

    def __init__(self, message: str, *, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        prefix = ""
        if source is not None:
            prefix = source if line is None else f"{source}:{line}"
        elif line is not None:
            prefix = f"line {line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class EmptyAlignmentError(MonostreamError):
    """An alignment with zero links was scored; the metric is undefined there."""


class EmptyProfileError(MonostreamError):
    """A delay profile with no target positions cannot yield a lagging value."""


class UndefinedNEError(MonostreamError):
    """Erasure cannot be normalized: the final hypothesis is empty or missing."""


class UnknownSessionError(MonostreamError):
    """No session with the requested id exists."""


class IllegalTransitionError(MonostreamError):
    """The requested session action is not legal in the current state."""
