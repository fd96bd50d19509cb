"""Exception hierarchy shared by every oscnl module."""


class OscnlError(Exception):
    """Base class for all library errors."""


class InvalidDimensionError(OscnlError, ValueError):
    """A mode dimension, occupation or operator shape is not admissible."""


class LabelError(OscnlError, ValueError):
    """Unknown, duplicated or empty set of mode labels."""


class TruncationError(OscnlError, ValueError):
    """A Fock truncation discards more weight than the declared tolerance.

    ``required_dim`` carries the smallest dimension that would satisfy the
    tolerance, when it is known.
    """

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class PhysicalityError(OscnlError, ValueError):
    """A state violates normalization, hermiticity or positivity bounds."""


class IntegrationError(OscnlError, RuntimeError):
    """The master-equation integrator could not meet its tolerance."""

    def __init__(self, message, worst_error=None):
        super().__init__(message)
        self.worst_error = worst_error


class GridTooNarrowError(OscnlError, ValueError):
    """Wigner function is not negligible on the boundary of the grid."""


class ConfigError(OscnlError, ValueError):
    """Invalid scenario configuration or override."""


class SchemaError(OscnlError, ValueError):
    """Two datasets cannot be compared column by column."""
