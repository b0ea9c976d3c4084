"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(RuntimeError):
    """An enumeration guard (budget, dimension, size) would be exceeded.

    ``guard`` names the limit so callers can report which knob to raise.
    """

    def __init__(self, message, guard=None):
        super().__init__(message)
        self.guard = guard


class FormatError(DomainError):
    """Malformed input text; carries the 1-based line and column when known."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
