"""Exception hierarchy shared by every module of the package."""


class DtlError(Exception):
    """Base class for all errors raised by :mod:`dtl`."""


class SignatureError(DtlError):
    """A formula, word or automaton does not fit the distributed signature."""


class ParseError(DtlError):
    """Concrete syntax could not be parsed.

    ``line`` and ``column`` are 1-based and point at the offending token.
    """

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class UnfairWordError(DtlError):
    """A global word starves at least one agent (no participation in the loop)."""

    def __init__(self, starved):
        self.starved = tuple(starved)
        names = ", ".join(self.starved)
        super().__init__(f"word is not fair: agent(s) {names} never participate in the loop")


class LabelMismatch(DtlError):
    """A run supplied with a word disagrees with the word's valuations."""


class PreconditionFailed(DtlError):
    """An operation was called on inputs that violate its precondition."""


class ResourceLimitExceeded(DtlError):
    """A state-space exploration hit its configured cap."""
