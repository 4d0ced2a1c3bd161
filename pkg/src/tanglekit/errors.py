"""Exception types shared across tanglekit."""


class TanglekitError(Exception):
    """Base class for all library errors."""


class CapExceeded(TanglekitError):
    """A computation would exceed a configured resource cap."""

    def __init__(self, what, requested, cap):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what}: requested {requested} exceeds cap {cap}")


class DomainError(TanglekitError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class ParseError(TanglekitError, ValueError):
    """Malformed tree, partition or tanglegram text."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} at byte offset {offset}")


class ConsistencyError(TanglekitError, AssertionError):
    """An internal identity failed; indicates a bug, never bad input."""
