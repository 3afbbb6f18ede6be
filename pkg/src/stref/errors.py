"""Exception hierarchy shared by every layer of the interpreter.

Runtime errors carry a ``kind`` (the name reported in ``ERROR line=<n>
kind=<k>`` markers) and the source line of the statement that raised them.
"""

from __future__ import annotations


class STError(Exception):
    """Base class for all program-level errors."""

    kind = "Error"

    def __init__(self, message: str = "", line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self) -> str:
        if self.line is not None:
            return f"{self.kind} at line {self.line}: {self.message}"
        return f"{self.kind}: {self.message}"


class LexError(STError):
    kind = "LexError"

    def __init__(self, line: int, column: int, message: str):
        super().__init__(message, line)
        self.column = column

    def __str__(self) -> str:
        return f"{self.kind} at {self.line}:{self.column}: {self.message}"


class ParseError(STError):
    kind = "ParseError"

    def __init__(self, line: int, column: int, expected: str, found: str):
        super().__init__(f"expected {expected}, found {found!r}", line)
        self.column = column
        self.expected = expected
        self.found = found

    def __str__(self) -> str:
        return f"{self.kind} at {self.line}:{self.column}: {self.message}"


class UnsupportedFeature(ParseError):
    kind = "Unsupported"

    def __init__(self, line: int, column: int, feature: str):
        STError.__init__(self, f"unsupported feature: {feature}", line)
        self.column = column
        self.expected = "supported construct"
        self.found = feature


class LiteralError(STError):
    kind = "LiteralError"


class STTypeError(STError):
    kind = "TypeError"


class ConvertError(STError):
    kind = "ConvertError"


class DivisionByZero(STError):
    kind = "DivisionByZero"


class DomainError(STError):
    kind = "DomainError"


class DefaultError(STError):
    kind = "DefaultError"


class RedeclarationError(STError):
    kind = "RedeclarationError"


class UnboundVariable(STError):
    kind = "UnboundVariable"


class IndexOutOfRange(STError):
    kind = "IndexOutOfRange"


class ConstError(STError):
    kind = "ConstError"


class EmptyStack(STError):
    kind = "EmptyStack"


class SemanticError(STError):
    kind = "SemanticError"


class UnknownPOU(STError):
    kind = "UnknownPOU"


class UnknownField(STError):
    kind = "UnknownField"


class ArityError(STError):
    kind = "ArityError"


class NotInstantiated(STError):
    kind = "NotInstantiated"


class EntryNotFound(STError):
    kind = "EntryNotFound"


class RecursionDetected(STError):
    kind = "RecursionError"


class StepLimitExceeded(Exception):
    """Raised when the fuel budget or the wall-clock deadline runs out.

    Deliberately not an :class:`STError`: a timeout is not an abnormal
    termination of the program.
    """
