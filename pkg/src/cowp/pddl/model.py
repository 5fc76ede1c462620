"""Immutable data model for the STRIPS + typing + negative-preconditions subset."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

ROOT_TYPE = "object"
CLONE_SEPARATOR = "__"


def is_variable(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)

    def __str__(self) -> str:
        return "(" + " ".join([self.name, *(f"{v} - {t}" for v, t in self.params)]) + ")"


@dataclass(frozen=True, order=True)
class Literal:
    predicate: str
    args: tuple[str, ...] = ()
    positive: bool = True

    @property
    def is_ground(self) -> bool:
        return not any(is_variable(a) for a in self.args)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(a for a in self.args if is_variable(a))

    @property
    def atom(self) -> "Literal":
        """The positive literal with the same predicate and arguments."""
        return self if self.positive else Literal(self.predicate, self.args, True)

    def negate(self) -> "Literal":
        return Literal(self.predicate, self.args, not self.positive)

    def substitute(self, mapping: Mapping[str, str]) -> "Literal":
        return Literal(self.predicate, tuple(mapping.get(a, a) for a in self.args), self.positive)

    def __str__(self) -> str:
        body = "(" + " ".join((self.predicate, *self.args)) + ")"
        return body if self.positive else f"(not {body})"


@dataclass(frozen=True)
class Condition:
    """A conjunction of literals. Duplicates are dropped, first occurrence wins."""

    conjuncts: tuple[Literal, ...] = ()

    def __post_init__(self):
        seen = dict.fromkeys(self.conjuncts)
        if len(seen) != len(self.conjuncts):
            object.__setattr__(self, "conjuncts", tuple(seen))

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.conjuncts)

    def __len__(self) -> int:
        return len(self.conjuncts)

    def __contains__(self, item: object) -> bool:
        return item in self.conjuncts

    @property
    def positive(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.conjuncts if l.positive)

    @property
    def negative(self) -> tuple[Literal, ...]:
        return tuple(l for l in self.conjuncts if not l.positive)

    @property
    def is_ground(self) -> bool:
        return all(l.is_ground for l in self.conjuncts)

    def with_literal(self, literal: Literal) -> "Condition":
        return Condition(self.conjuncts + (literal,))

    def substitute(self, mapping: Mapping[str, str]) -> "Condition":
        return Condition(tuple(l.substitute(mapping) for l in self.conjuncts))


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...] = ()
    precondition: Condition = field(default_factory=Condition)
    effect: Condition = field(default_factory=Condition)

    @property
    def base_name(self) -> str:
        """Name of the schema this one was cloned from (itself if not a clone)."""
        return self.name.split(CLONE_SEPARATOR, 1)[0]

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)

    def param_index(self, variable: str) -> int:
        return self.variables.index(variable)


@dataclass(frozen=True)
class DomainDescription:
    name: str
    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()
    constants: tuple[tuple[str, str], ...] = ()
    predicates: tuple[PredicateSchema, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    @cached_property
    def type_parents(self) -> dict[str, str]:
        return dict(self.types)

    @cached_property
    def _predicate_index(self) -> dict[str, PredicateSchema]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def _action_index(self) -> dict[str, ActionSchema]:
        return {a.name: a for a in self.actions}

    def has_type(self, name: str) -> bool:
        return name == ROOT_TYPE or name in self.type_parents

    def ancestors(self, name: str) -> list[str]:
        """``name`` followed by its parents up to the root type."""
        chain = [name]
        while chain[-1] != ROOT_TYPE:
            parent = self.type_parents.get(chain[-1], ROOT_TYPE)
            if parent in chain:  # defensive; the parser rejects cycles
                break
            chain.append(parent)
        return chain

    def is_subtype(self, name: str, ancestor: str) -> bool:
        return ancestor in self.ancestors(name)

    def depth(self, name: str) -> int:
        return len(self.ancestors(name)) - 1

    def common_ancestor(self, a: str, b: str) -> str:
        up = self.ancestors(b)
        for t in self.ancestors(a):
            if t in up:
                return t
        return ROOT_TYPE

    def predicate(self, name: str) -> PredicateSchema | None:
        return self._predicate_index.get(name)

    def action(self, name: str) -> ActionSchema | None:
        return self._action_index.get(name)


@dataclass(frozen=True)
class ProblemDescription:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...] = ()
    init: tuple[Literal, ...] = ()
    goal: Condition = field(default_factory=Condition)

    def __post_init__(self):
        unique = tuple(dict.fromkeys(self.init))
        if len(unique) != len(self.init):
            object.__setattr__(self, "init", unique)

    @cached_property
    def object_types(self) -> dict[str, str]:
        return dict(self.objects)

    def with_init(self, atoms: Iterable[Literal]) -> "ProblemDescription":
        return ProblemDescription(self.name, self.domain_name, self.objects, tuple(atoms), self.goal)


@dataclass(frozen=True, order=True)
class GroundAction:
    schema: str
    binding: tuple[str, ...]
    precondition: Condition = field(compare=False, default_factory=Condition)
    effect: Condition = field(compare=False, default_factory=Condition)

    @property
    def base_name(self) -> str:
        return self.schema.split(CLONE_SEPARATOR, 1)[0]

    def __str__(self) -> str:
        return " ".join((self.schema, *self.binding))

    def display(self) -> str:
        """Human form used in plan listings; clones print under their base name."""
        return " ".join((self.base_name, *self.binding))


@dataclass(frozen=True)
class WorldState:
    """Closed-world state: an atom is true iff it is in ``atoms``."""

    atoms: frozenset[Literal] = frozenset()

    def __post_init__(self):
        if not isinstance(self.atoms, frozenset):
            object.__setattr__(self, "atoms", frozenset(self.atoms))
        for atom in self.atoms:
            if not atom.positive or not atom.is_ground:
                raise ValueError(f"world states hold positive ground atoms, got {atom}")

    def __contains__(self, atom: object) -> bool:
        return atom in self.atoms

    def __len__(self) -> int:
        return len(self.atoms)

    def sorted(self) -> list[Literal]:
        return sorted(self.atoms)

    def with_atoms(self, atoms: Iterable[Literal]) -> "WorldState":
        return WorldState(self.atoms | frozenset(atoms))
