"""Exception types shared across the package.

The CLI maps these onto its exit codes, so keep the hierarchy flat.
"""


class RotorSmcError(Exception):
    """Base class for all package errors."""


class ConfigError(RotorSmcError, ValueError):
    """Invalid parameter, preset or configuration value."""


class NumericInputError(RotorSmcError, ValueError):
    """Non-finite number passed where a finite one is required."""


class FormatError(RotorSmcError, ValueError):
    """Series with mismatched length, sampling or layout."""


class NoDominantFrequencyError(RotorSmcError):
    """Signal has no non-DC spectral content."""


class CrossingNotFoundError(RotorSmcError):
    """Magnitude curve never crosses the -3 dB level inside the sweep."""


class UndefinedResultError(RotorSmcError):
    """Metric is undefined for the given data (e.g. every MAPD sample excluded)."""


class NumericFaultError(RotorSmcError):
    """Simulation state became non-finite."""
