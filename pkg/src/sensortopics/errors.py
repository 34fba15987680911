"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
anything else -> 3.
"""


class SensorTopicsError(Exception):
    """Base class for all package errors."""


class ConfigError(SensorTopicsError):
    """Invalid configuration or parameter value."""


class DataError(SensorTopicsError):
    """Missing, malformed, or mutually inconsistent input data."""
