"""Knowledge acquisition: new affordances via the affordance question, plan selection via the selection question."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

from .monitor import situation_clause
from .oracle import Oracle, Phrasebook, PromptKind, humanize, render_affordance_prompt, render_selection_prompt
from .pddl import DomainDescription, GroundAction, Literal, ProblemDescription, instantiate
from .pddl.semantics import candidates as typed_candidates
from .pddl.semantics import typed_objects
from .planner import Plan
from .surgery import AffordanceFact

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Role:
    """Parameter ``index`` of ``action`` at plan position ``step``."""

    step: int
    action: GroundAction
    index: int


def choose_role(
    plan: Plan, start: int, blocked: int, subject: str, domain: DomainDescription
) -> Role | None:
    """The slot an alternative object would have to fill.

    Among the remaining steps, look for parameters bound to ``subject`` and
    take the one with the most specific declared type: that is the action
    that actually needs this kind of object ("fill" needs a cup, while
    "grasp" takes any container). Ties go to the blocked step, then the
    earliest one.
    """
    best = None
    for i in range(start, len(plan)):
        action = plan[i]
        schema = domain.action(action.schema)
        if schema is None:
            continue
        for k, arg in enumerate(action.binding):
            if arg != subject:
                continue
            rank = (-domain.depth(schema.params[k][1]), i != blocked, i, k)
            if best is None or rank < best[0]:
                best = (rank, Role(i, action, k))
    return best[1] if best else None


def object_classes(available: Sequence[tuple[str, str]]) -> list[str]:
    """Distinct classes in first-seen (catalog) order."""
    return list(dict.fromkeys(t for _, t in available))


def fits_role(domain: DomainDescription, object_class: str, role_type: str) -> bool:
    return domain.has_type(object_class) and domain.is_subtype(object_class, role_type)


def acquire_affordances(
    blocked: GroundAction,
    role: int,
    available: Sequence[tuple[str, str]],
    oracle: Oracle,
    book: Phrasebook,
    domain: DomainDescription,
) -> list[AffordanceFact]:
    """Ask, class by class, whether an available object could stand in for ``role``.

    Classes that already fit the role's declared type need no commonsense
    and are returned without a query (``provenance`` is ``None``). Every
    other returned fact points at the Yes exchange behind it.
    """
    if not available:
        raise ValueError("no objects available to reason about")
    schema = domain.action(blocked.schema)
    role_type = schema.params[role][1]
    facts = []
    for cls in object_classes(available):
        if fits_role(domain, cls, role_type):
            facts.append(AffordanceFact(cls, schema.name, role))
            continue
        prompt = render_affordance_prompt(book.action_with_object(blocked, role, cls))
        ex = oracle.query(prompt, PromptKind.AFFORDANCE)
        if ex.verdict.is_yes:
            facts.append(AffordanceFact(cls, schema.name, role, ex.id))
    return facts


def predicate_phrase(predicate: str) -> str:
    """``is_dirty`` -> "is dirty", ``has_no_water`` -> "has no water"."""
    return humanize(predicate)


def acquire_state_changes(
    situation: Literal,
    repair_actions: Sequence[str],
    oracle: Oracle,
    book: Phrasebook,
    domain: DomainDescription,
    problem: ProblemDescription,
) -> list[AffordanceFact]:
    """Ask whether an existing action would undo ``situation`` on its subject.

    Only actions listed in ``repair_actions`` are considered, e.g. "wash a
    cup that is dirty". A Yes gives a fact whose ``clears`` literal the
    surgery turns into a delete effect.
    """
    subject = situation.args[0]
    objects = typed_objects(domain, problem)
    types = dict(objects)
    if subject not in types:
        return []
    facts = []
    for name in repair_actions:
        schema = domain.action(name)
        if schema is None:
            continue
        for k, (var, t) in enumerate(schema.params):
            if not domain.is_subtype(types[subject], t):
                continue
            pools = [typed_candidates(domain, objects, pt) if j != k else [subject] for j, (_, pt) in enumerate(schema.params)]
            if any(not pool for pool in pools):
                continue
            ground = instantiate(schema, tuple(pool[0] for pool in pools))
            phrase = f"{book.action_to_nl(ground)} that {predicate_phrase(situation.predicate)}"
            ex = oracle.query(render_affordance_prompt(phrase), PromptKind.AFFORDANCE)
            if ex.verdict.is_yes:
                facts.append(
                    AffordanceFact(types[subject], name, k, ex.id, clears=Literal(situation.predicate, (var,)))
                )
            break
    return facts


@dataclass(frozen=True)
class Candidate:
    label: str  # object class (or repair action) the plan relies on
    plan: Plan
    payload: Any = None


def select_best(
    candidates: Sequence[Candidate], task_nl: str, situation_nl: str, oracle: Oracle
) -> tuple[Candidate, str | None]:
    """Pick one candidate; returns it with the id of the selection exchange, if any.

    A single candidate is returned without asking. An answer naming none of
    the objects falls back to the first candidate.
    """
    if not candidates:
        raise ValueError("no candidates to select from")
    if len(candidates) == 1:
        return candidates[0], None
    names = [humanize(c.label) for c in candidates]
    prompt = render_selection_prompt(names, task_nl, situation_clause(situation_nl))
    ex = oracle.query(prompt, PromptKind.SELECTION, names)
    if ex.verdict.choice is not None and ex.verdict.choice in names:
        return candidates[names.index(ex.verdict.choice)], ex.id
    log.warning("selection answer %r names no candidate; using %s", ex.completion, candidates[0].label)
    return candidates[0], ex.id
