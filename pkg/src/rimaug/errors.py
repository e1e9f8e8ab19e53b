"""Exception hierarchy shared by every rimaug module."""


class RimError(Exception):
    """Base class for all rimaug errors."""


class DimensionError(RimError, ValueError):
    """Array shapes or lengths do not agree."""


class DomainError(RimError, ValueError):
    """A scalar parameter lies outside its admissible domain."""


class InputError(RimError, ValueError):
    """Input data is empty, non-finite, or otherwise unusable."""


class ConfigError(RimError, ValueError):
    """Invalid configuration (distribution spec, counts, model spec)."""


class IndexRangeError(RimError, IndexError):
    """An index is outside the admissible range."""


class FormatError(RimError, ValueError):
    """A dataset file is structurally malformed."""

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = ""
        if line is not None:
            where = f"line {line}"
            if field is not None:
                where += f", field {field}"
            where += ": "
        super().__init__(where + message)


class ParseError(FormatError):
    """A field in a dataset file could not be parsed as a number."""


class IntegrationError(RimError, ArithmeticError):
    """The ODE integrator produced a non-finite state."""


class TrainingError(RimError, ArithmeticError):
    """Training diverged (non-finite loss)."""

    def __init__(self, message, epoch=None):
        self.epoch = epoch
        super().__init__(message if epoch is None else f"epoch {epoch}: {message}")


class VerificationError(RimError):
    """A numerical verification did not meet its threshold."""
