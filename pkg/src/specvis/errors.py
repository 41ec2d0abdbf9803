"""Exception hierarchy shared by the library and the command line."""


class SpecvisError(Exception):
    """Base class for all errors raised by specvis."""


class UsageError(SpecvisError, ValueError):
    """A caller passed arguments outside an operation's contract."""


class ConfigError(UsageError):
    """An experiment configuration key is missing, unknown or malformed."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"config key {key!r}: {message}")


class ValidationError(SpecvisError, ValueError):
    """Input data violates an invariant (non-finite heights, zero power, ...)."""


class IngestionError(ValidationError):
    """A file could not be read or decoded."""
