"""Exception hierarchy shared by the pipeline stages."""


class FuelTaxError(Exception):
    """Base class for all package errors."""


class DataError(FuelTaxError, ValueError):
    """Input data is malformed, incomplete or inconsistent."""


class ParseError(DataError):
    """A CSV input could not be parsed.

    ``line`` is the 1-based line number in the source text (the header is
    line 1), or ``None`` when the problem is not tied to a single line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ModelError(FuelTaxError):
    """A model could not be fitted, loaded or applied."""


class LayoutMismatch(ModelError):
    """A model was asked to predict under a feature layout it was not trained on."""


class ConfigError(FuelTaxError):
    """Bad key or value in a config file or flag; reported as a usage error."""
