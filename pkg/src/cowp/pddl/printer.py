"""Canonical PDDL printer: 4-space indent, one literal per line inside ``(and ...)``."""

from __future__ import annotations

from itertools import groupby

from .model import ActionSchema, Condition, DomainDescription, ProblemDescription

INDENT = "    "


def _typed(pairs) -> list[str]:
    """Group consecutive entries with the same type: ``a b - t``."""
    lines = []
    for t, group in groupby(pairs, key=lambda p: p[1]):
        lines.append(" ".join(name for name, _ in group) + f" - {t}")
    return lines


def _inline_typed(pairs) -> str:
    return " ".join(_typed(pairs))


def _conjunction(cond: Condition, indent: str) -> list[str]:
    """Render ``cond`` as ``(and (a)`` followed by aligned ``(b))`` lines."""
    lits = [str(l) for l in cond]
    if not lits:
        return [indent + "()"]
    first, rest = lits[0], lits[1:]
    lines = [f"{indent}(and {first}"]
    pad = indent + " " * len("(and ")
    lines.extend(pad + lit for lit in rest)
    lines[-1] += ")"
    return lines


def _section(keyword: str, body: list[str]) -> list[str]:
    return [f"{INDENT}({keyword}", *(INDENT * 2 + line for line in body), f"{INDENT})"]


def _action(a: ActionSchema) -> list[str]:
    inner = INDENT * 2
    lines = [f"{INDENT}(:action {a.name}", f"{inner}:parameters ({_inline_typed(a.params)})"]
    lines.append(f"{inner}:precondition")
    lines.extend(_conjunction(a.precondition, inner + INDENT))
    lines.append(f"{inner}:effect")
    lines.extend(_conjunction(a.effect, inner + INDENT))
    lines.append(f"{INDENT})")
    return lines


def serialize_domain(d: DomainDescription) -> str:
    body: list[str] = []
    if d.requirements:
        body.append(f"{INDENT}(:requirements {' '.join(d.requirements)})")
    if d.types:
        body.extend(_section(":types", _typed(d.types)))
    if d.constants:
        body.extend(_section(":constants", _typed(d.constants)))
    if d.predicates:
        body.extend(_section(":predicates", [str(p) for p in d.predicates]))
    for a in d.actions:
        body.extend(_action(a))
    head = f"(define (domain {d.name})"
    if not body:
        return head + ")\n"
    return "\n".join([head, *body]) + "\n)\n"


def serialize_problem(p: ProblemDescription) -> str:
    body = [f"{INDENT}(:domain {p.domain_name})"]
    if p.objects:
        body.extend(_section(":objects", _typed(p.objects)))
    body.append(f"{INDENT}(:init")
    body.extend(INDENT * 2 + str(l) for l in p.init)
    body[-1] += ")"
    body.append(f"{INDENT}(:goal")
    body.extend(_conjunction(p.goal, INDENT * 2))
    body[-1] += ")"
    return "\n".join([f"(define (problem {p.name})", *body]) + "\n)\n"
