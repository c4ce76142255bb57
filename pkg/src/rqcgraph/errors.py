"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input fails a structural check (bad graph, bad config)."""


class CapacityError(RuntimeError):
    """Raised when a request exceeds a hard size limit (term count, qudit count)."""
