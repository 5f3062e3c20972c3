"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input or certificate failed a check."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Inconclusive(RuntimeError):
    """An oracle ran out of budget before reaching a verdict."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class PathOverflow(RuntimeError):
    """Path enumeration exceeded its cap; callers should switch to fast mode."""

    def __init__(self, cap: int):
        super().__init__(f"more than {cap} induced paths")
        self.cap = cap


class SamplingFailure(RuntimeError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report or {}
