"""Exception hierarchy. Every error knows the exit code the CLI reports for it."""

from __future__ import annotations

from typing import Iterable, List, Optional


class SnakeError(Exception):
    exit_code = 1


class ParseError(SnakeError):
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class ModelValidationError(SnakeError):
    exit_code = 2

    def __init__(self, message: str, violations: Iterable[str] = ()):
        self.violations: List[str] = list(violations)
        super().__init__(message)


class RecognitionError(SnakeError):
    exit_code = 2


class SurgeryError(SnakeError):
    exit_code = 2


class PizzaError(SnakeError):
    exit_code = 2


class OracleError(SnakeError):
    exit_code = 2


class IndeterminateError(SnakeError):
    """The available terms do not decide an exponent."""

    exit_code = 3
