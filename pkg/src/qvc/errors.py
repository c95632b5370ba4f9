"""Exception types shared across the package."""


class QvcError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(QvcError, ValueError):
    """A parameter value is outside the supported range or combination."""


class DataFormatError(QvcError, ValueError):
    """An input file does not match the expected format."""
