"""Exception types raised by the layout pipeline."""

from __future__ import annotations


class StorylineError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(StorylineError, ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(StorylineError, ValueError):
    pass


class SeriationError(StorylineError, RuntimeError):
    """The eigensolver failed to reach the requested residual."""

    def __init__(self, message: str, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")


class ConstraintCycleError(StorylineError, RuntimeError):
    """The alignment classes induce a cycle in the ordering constraints."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("alignment classes form a constraint cycle: " + " -> ".join(map(str, self.cycle)))


class StageError(StorylineError):
    """Wraps an error raised inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
