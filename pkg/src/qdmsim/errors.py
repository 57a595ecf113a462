"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DomainError and
subclasses -> 2, OSError -> 3.
"""


class DomainError(ValueError):
    """A physical or numeric precondition was violated."""


class OutOfRangeError(DomainError):
    """An intensity fell outside a curve's fitted validity range."""


class ExtractionError(DomainError):
    """A calibration trace did not support the requested extraction."""


class ConfigError(ValueError):
    """Config text could not be parsed or validated."""
