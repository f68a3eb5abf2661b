"""Shared exception types for the boostlab package."""


class BoostLabError(Exception):
    """Base class for all boostlab errors."""


class InputShapeError(BoostLabError):
    """Array dimensions do not match what an operation requires."""


class InvalidParameterError(BoostLabError):
    """A configuration value or argument is outside its valid range."""


class NumericOverflowError(BoostLabError):
    """A computation produced non-finite intermediates."""


class EmptyInputError(BoostLabError):
    """An operation that requires data received none."""


class InsufficientDataError(BoostLabError):
    """Too few samples to compute the requested statistic."""


class CsvParseError(BoostLabError):
    """A CSV file could not be parsed; the message carries the row number."""


class ConfigurationError(BoostLabError):
    """Incompatible pieces were wired together (e.g. class-count mismatch)."""
