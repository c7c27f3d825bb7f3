"""Exception types shared across the package."""


class QpistonError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(QpistonError):
    """Bad or inconsistent configuration input."""


class ValidationError(QpistonError):
    """An operator or state failed a structural check."""


class TruncationError(QpistonError):
    """A state does not fit in the requested Fock dimension."""

    def __init__(self, message, minimal_dim=None):
        super().__init__(message)
        self.minimal_dim = minimal_dim


class PositivityError(QpistonError):
    """A propagated state developed a non-negligible negative eigenvalue."""
