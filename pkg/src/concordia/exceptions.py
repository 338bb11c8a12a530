"""Exception hierarchy shared by all concordia modules."""


class ConcordiaError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ConcordiaError, ValueError):
    """A copula expression (or one of its parameters) is malformed."""


class NotAShuffle(ConcordiaError):
    """The expression has no shuffle-of-M normal form."""


class NotComputableExactly(ConcordiaError):
    """No closed form is available; callers fall back to an oracle estimate."""


class OutOfRegion(ConcordiaError, ValueError):
    """A point lies outside the attainable region (or its projection)."""

    def __init__(self, message, violated=()):
        super().__init__(message)
        self.violated = tuple(violated)


class OutOfFace(ConcordiaError, ValueError):
    """A synthesis target does not lie on the requested face."""


class ConsistencyError(ConcordiaError, RuntimeError):
    """An internal invariant failed. Always a bug, never a user error."""
