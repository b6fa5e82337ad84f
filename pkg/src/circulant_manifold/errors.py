"""Exception hierarchy."""


class CirculantError(Exception):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(CirculantError):
    """Malformed expression text; ``offset`` is the 0-based character position."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExprSyntaxError):
    pass


class VariableIndexError(ExprSyntaxError):
    pass


class DomainError(CirculantError):
    """Evaluation left the domain of an operation (ln of non-positive, 1/0, ...)."""


class DomainViolation(CirculantError):
    """A point lies outside the admitted domain of a metric."""


class MetricFileError(CirculantError):
    """A metric description could not be read."""


class EmptySampleError(CirculantError):
    """Rejection sampling found no admitted point within its budget."""
