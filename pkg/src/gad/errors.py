"""Exception hierarchy shared by all gad modules."""


class GadError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(GadError):
    """Invalid hyperparameters, capture parameters, or run configuration."""


class DataError(GadError):
    """Non-finite or otherwise unusable input data."""


class UsageError(GadError):
    """An operation was called in a state or with arguments it does not allow."""


class TrainingError(GadError):
    """A training window that cannot be fitted (e.g. fewer than 2 values)."""


class ParseError(GadError):
    """A trace file row that could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class GenerationError(GadError):
    """Detector generation failed, e.g. the gait segment was too short."""
