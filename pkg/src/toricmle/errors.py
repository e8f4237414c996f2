"""Exception hierarchy. Everything derives from ``ValueError`` so callers that
only care about bad input can catch that."""


class ToricMLEError(ValueError):
    pass


class DimensionError(ToricMLEError):
    pass


class PreconditionError(ToricMLEError):
    """An operation was called outside its contract."""


class EnumerationLimitError(ToricMLEError):
    pass


class NotConvergedError(ToricMLEError):
    pass


class CrossCheckError(ToricMLEError):
    """Two independent routes disagreed. ``details`` carries both sides."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class InputError(ToricMLEError):
    """Malformed input file or payload."""
