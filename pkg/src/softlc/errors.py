"""Exception types shared across the package."""

from __future__ import annotations


class SlcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SlcError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class DuplicateDefinition(SlcError):
    def __init__(self, name: str):
        super().__init__(f"duplicate definition: {name}")
        self.name = name


class MarkerPresent(SlcError):
    """A type marker was found where only bare terms are allowed."""


class NotDesugared(SlcError):
    """A plain let was found; run expand_plain_let first."""


class InvalidPath(SlcError):
    pass


class NotATerm(SlcError):
    """The pseudo-term does not satisfy the termhood conditions."""


class NotARedex(SlcError):
    pass


class StepCapExceeded(SlcError):
    """A reduction ran past its step cap; with the default certificate cap
    this signals a violated length bound, never an expected outcome."""


class MonitorViolation(SlcError):
    """A monitored reduction step failed a weight/measure decrease check."""


class CapExceeded(SlcError):
    """Exhaustive exploration outgrew its node budget."""


class RankTooSmall(SlcError):
    """The weight parameter n is below the rank of the term."""


class SideConditionUnmet(SlcError):
    pass


class TypeCheckError(SlcError):
    def __init__(self, path: tuple[int, ...], message: str):
        super().__init__(f"at {list(path)}: {message}")
        self.path = path
        self.message = message


class TypeMismatch(TypeCheckError):
    def __init__(self, path: tuple[int, ...], expected: object, found: object):
        super().__init__(path, f"expected {expected}, found {found}")
        self.expected = expected
        self.found = found


class LinearityViolation(TypeCheckError):
    pass


class DepthViolation(TypeCheckError):
    pass


class ForallEscape(TypeCheckError):
    pass


class UnknownVariable(TypeCheckError):
    pass


class NotAListValue(SlcError):
    pass


class NotACountedValue(SlcError):
    pass
