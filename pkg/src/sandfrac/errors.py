"""Exception families used across the toolkit.

The CLI maps these onto exit codes: InputError -> 2, ConfigError -> 3,
NumericError -> 4.
"""


class SandfracError(Exception):
    """Base class for all toolkit errors."""


class InputError(SandfracError):
    """Input data is malformed or inconsistent (bad file, missing column,
    dimension mismatch)."""


class OutOfRangeError(InputError):
    """A query fell outside the supported interpolation span."""


class ConfigError(SandfracError):
    """A configuration value or flag is invalid."""


class ParameterError(ConfigError, ValueError):
    """An operation was called with parameters outside its domain."""


class RuleExplosionError(ConfigError):
    """A grid partition would exceed the configured rule cap."""


class NumericError(SandfracError):
    """A numeric failure during inference or training."""


class DegenerateFiringError(NumericError):
    """Every rule fired with strength zero for an input."""


class DivergenceError(NumericError):
    """Training error grew past the divergence threshold."""


class UndefinedMetricError(NumericError, ValueError):
    """A performance metric is undefined for the given vectors."""
