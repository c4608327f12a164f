"""Exception hierarchy shared by all blindmatch modules."""


class BlindMatchError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(BlindMatchError, ValueError):
    """An argument violates an operation's precondition."""


class FormatError(BlindMatchError, ValueError):
    """An input file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DataError(BlindMatchError, ValueError):
    """Input data is well formed but semantically invalid (e.g. a self-loop)."""


class InsufficientDataError(BlindMatchError, ValueError):
    """Too few signal samples for the requested estimate."""


class NumericDomainError(BlindMatchError, ArithmeticError):
    """A formula is evaluated outside its domain (pole, zero gap, ...)."""


class ConfigError(BlindMatchError, ValueError):
    """An experiment configuration is invalid."""
