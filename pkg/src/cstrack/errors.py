"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from .constants import EXIT_IO, EXIT_NUMERIC, EXIT_TRACKING, EXIT_USAGE


class CSTrackError(Exception):
    exit_code = 1


class ParameterError(CSTrackError, ValueError):
    exit_code = EXIT_USAGE


class ConfigurationError(CSTrackError):
    exit_code = EXIT_IO


class FormatError(CSTrackError):
    exit_code = EXIT_IO


class NumericError(CSTrackError, ArithmeticError):
    exit_code = EXIT_NUMERIC


class SolverError(CSTrackError, RuntimeError):
    """The objective increased: the operator or step size is broken."""

    exit_code = EXIT_NUMERIC


class TrackingError(CSTrackError):
    exit_code = EXIT_TRACKING


class MetricError(CSTrackError):
    exit_code = EXIT_TRACKING
