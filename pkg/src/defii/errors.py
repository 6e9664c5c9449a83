from __future__ import annotations

from dataclasses import dataclass


class DefiiError(Exception):
    """Base class; ``code`` is the machine-readable error name used by the service."""

    code = "internal-error"


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


class ParseError(DefiiError, ValueError):
    code = "parse-error"

    def __init__(self, line: int, column: int, message: str) -> None:
        self.diagnostic = ParseDiagnostic(line, column, message)
        super().__init__(str(self.diagnostic))


class ValidationError(DefiiError, ValueError):
    code = "validation-error"

    def __init__(self, message: str, code: str | None = None, offenders=()) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code
        self.offenders = list(offenders)


class NotFoundError(DefiiError, LookupError):
    code = "not-found"

    def __init__(self, message: str, code: str | None = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class QueryEvaluationError(DefiiError):
    code = "evaluation-error"
