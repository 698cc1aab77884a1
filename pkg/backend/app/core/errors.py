from typing import Optional


class PlanarMapError(ValueError):
    """Base class for every domain error raised by the toolkit."""


class ParseError(PlanarMapError):
    def __init__(self, message: str, text: str = "", line: int = 1, column: int = 1):
        self.text = text
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")

    @classmethod
    def at_offset(cls, message: str, text: str, offset: int) -> "ParseError":
        """Build the error from a 0-based offset into ``text``."""
        before = text[:offset]
        line = before.count("\n") + 1
        column = offset - (before.rfind("\n") + 1) + 1
        return cls(message, text, line, column)


class SizeMismatchError(PlanarMapError):
    pass


class InvalidStructureError(PlanarMapError):
    pass


class CapExceededError(PlanarMapError):
    def __init__(self, message: str, hint: Optional[str] = None):
        self.hint = hint
        super().__init__(f"{message}; {hint}" if hint else message)
