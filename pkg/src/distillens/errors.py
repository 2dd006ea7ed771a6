"""Exception types shared across the toolkit."""

from __future__ import annotations


class DistillensError(Exception):
    """Base class for data and domain errors raised by this package."""


class FormatError(DistillensError):
    """Malformed input data, located by file path and line when known."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class ValidationError(DistillensError):
    """Structurally valid data that violates a cross-input constraint."""
