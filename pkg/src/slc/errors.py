"""Exception hierarchy shared across the package."""


class SlcError(Exception):
    """Base class for errors raised by this package."""


class ContractViolation(SlcError):
    """A documented precondition was violated by the caller."""


class ParseError(SlcError):
    """Source text does not match the grammar.

    Carries the 1-based source position and the set of token kinds that
    would have been accepted at that point.
    """

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = expected

    def to_dict(self) -> dict:
        return {
            "error": "parse",
            "message": self.message,
            "line": self.line,
            "col": self.col,
            "expected": list(self.expected),
        }
