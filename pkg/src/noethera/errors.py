"""Exception hierarchy shared by every module of the engine."""


class NoetheraError(Exception):
    """Base class for all errors raised by this package."""


class ContextMismatchError(NoetheraError):
    """Operands belong to different problem contexts."""


class UnsupportedPowerError(NoetheraError):
    """A power (or substitution) would need a symbolic power of a sum."""


class JetOrderError(NoetheraError):
    """An input exceeds the jet order an operation supports."""


class ParseError(NoetheraError):
    """Malformed expression text. ``position`` is a 0-based offset or None."""

    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UndeclaredNameError(ParseError):
    def __init__(self, name, position=None, source=None, hint=""):
        self.name = name
        msg = f"undeclared identifier {name!r}"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg, position, source)


class ProblemSchemaError(NoetheraError):
    """A problem document violates the schema; ``path`` locates the field."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class OutOfScopeError(NoetheraError):
    """Input lies outside the class of expressions the procedure decides."""


class NotADivergenceError(NoetheraError):
    pass


class HomotopyDegeneracyError(NoetheraError):
    """A monomial has vanishing total u-degree, so the lambda integral diverges."""


class CannotSolveError(NoetheraError):
    """On-shell reduction impossible for the chosen jet variable."""
