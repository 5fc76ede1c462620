"""PDDL lexing, parsing, printing, grounding and state semantics."""

from .errors import (
    CapacityError,
    NonGroundError,
    PDDLError,
    PDDLSyntaxError,
    PreconditionViolation,
    SemanticError,
    UnsupportedFeature,
)
from .model import (
    ROOT_TYPE,
    ActionSchema,
    Condition,
    DomainDescription,
    GroundAction,
    Literal,
    PredicateSchema,
    ProblemDescription,
    WorldState,
    is_variable,
)
from .parser import parse_domain, parse_problem, validate_domain, validate_problem
from .printer import serialize_domain, serialize_problem
from .semantics import DEFAULT_CAPACITY, apply, first_unsatisfied, ground, holds, instantiate

__all__ = [
    "ROOT_TYPE",
    "ActionSchema",
    "CapacityError",
    "Condition",
    "DEFAULT_CAPACITY",
    "DomainDescription",
    "GroundAction",
    "Literal",
    "NonGroundError",
    "PDDLError",
    "PDDLSyntaxError",
    "PreconditionViolation",
    "PredicateSchema",
    "ProblemDescription",
    "SemanticError",
    "UnsupportedFeature",
    "WorldState",
    "apply",
    "first_unsatisfied",
    "ground",
    "holds",
    "instantiate",
    "is_variable",
    "parse_domain",
    "parse_problem",
    "serialize_domain",
    "serialize_problem",
    "validate_domain",
    "validate_problem",
]
