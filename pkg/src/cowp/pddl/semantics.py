"""Grounding and closed-world state semantics."""

from __future__ import annotations

from itertools import product
from math import prod

from .errors import CapacityError, NonGroundError, PreconditionViolation
from .model import (
    ActionSchema,
    Condition,
    DomainDescription,
    GroundAction,
    ProblemDescription,
    WorldState,
)

DEFAULT_CAPACITY = 10**6


def typed_objects(d: DomainDescription, p: ProblemDescription) -> list[tuple[str, str]]:
    """Domain constants followed by problem objects."""
    return list(d.constants) + list(p.objects)


def candidates(d: DomainDescription, objects: list[tuple[str, str]], type_name: str) -> list[str]:
    return sorted(name for name, t in objects if d.is_subtype(t, type_name))


def instantiate(schema: ActionSchema, binding: tuple[str, ...]) -> GroundAction:
    mapping = dict(zip(schema.variables, binding))
    return GroundAction(
        schema.name,
        tuple(binding),
        schema.precondition.substitute(mapping),
        schema.effect.substitute(mapping),
    )


def ground(
    d: DomainDescription, p: ProblemDescription, capacity: int = DEFAULT_CAPACITY
) -> list[GroundAction]:
    """Every type-consistent instance of every schema.

    Ordered by schema name, then lexicographically by binding.
    """
    objects = typed_objects(d, p)
    pools = {a.name: [candidates(d, objects, t) for _, t in a.params] for a in d.actions}
    total = sum(prod(len(pool) for pool in pools[a.name]) for a in d.actions)
    if total > capacity:
        raise CapacityError(f"grounding would produce {total} actions (bound {capacity})")
    out: list[GroundAction] = []
    for schema in sorted(d.actions, key=lambda a: a.name):
        for binding in product(*pools[schema.name]):
            out.append(instantiate(schema, binding))
    return out


def _require_ground(c: Condition) -> None:
    for lit in c:
        if not lit.is_ground:
            raise NonGroundError(f"{lit} contains variables")


def holds(s: WorldState, c: Condition) -> bool:
    _require_ground(c)
    return all((lit.atom in s.atoms) == lit.positive for lit in c)


def first_unsatisfied(s: WorldState, c: Condition):
    _require_ground(c)
    for lit in c:
        if (lit.atom in s.atoms) != lit.positive:
            return lit
    return None


def apply(s: WorldState, a: GroundAction) -> WorldState:
    """Delete-then-add successor of ``s`` under ``a``."""
    failing = first_unsatisfied(s, a.precondition)
    if failing is not None:
        raise PreconditionViolation(a, failing)
    _require_ground(a.effect)
    dels = {l.atom for l in a.effect.negative}
    adds = {l for l in a.effect.positive}
    return WorldState((s.atoms - dels) | adds)
