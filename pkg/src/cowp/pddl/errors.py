"""Exceptions raised by the PDDL layer."""

from __future__ import annotations


class PDDLError(Exception):
    """Base class for everything the PDDL layer raises."""


class PDDLSyntaxError(PDDLError, SyntaxError):
    """Malformed s-expression input. Carries 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line else ""
        super().__init__(f"{message}{where}")
        # SyntaxError's own attributes, so tooling that inspects them still works
        self.msg = message
        self.lineno = line
        self.offset = column

    def __str__(self) -> str:
        where = f" (line {self.line}, column {self.column})" if self.line else ""
        return f"{self.msg}{where}"


class SemanticError(PDDLError):
    """Well-formed input that violates a domain/problem invariant."""


class UnsupportedFeature(SemanticError):
    """A PDDL construct outside the strips/typing/negative-preconditions subset."""


class CapacityError(PDDLError):
    """Grounding would exceed the configured bound."""


class NonGroundError(PDDLError):
    """A ground literal was required but variables were found."""


class PreconditionViolation(PDDLError):
    def __init__(self, action, literal):
        self.action = action
        self.literal = literal
        super().__init__(f"{action}: precondition {literal} does not hold")
