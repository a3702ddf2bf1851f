"""Exception types shared across the package."""

from __future__ import annotations


class CodeLoopError(Exception):
    """Base class for all package errors."""


class DimensionError(CodeLoopError, ValueError):
    """Operands have incompatible lengths or shapes."""


class ParseError(CodeLoopError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(CodeLoopError, ValueError):
    """Input is well formed but violates a mathematical requirement."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class ContextError(CodeLoopError, ValueError):
    """Operands belong to different groups or loops."""


class CapacityError(CodeLoopError, RuntimeError):
    """Requested enumeration exceeds the configured size limit."""


class StructuralError(CodeLoopError, RuntimeError):
    """A structure that must lie in a known subgroup did not."""
