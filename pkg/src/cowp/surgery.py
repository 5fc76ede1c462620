"""Copy-on-write mutations of planning knowledge.

Three kinds of edit are supported, each returning a new description and
leaving its input untouched:

* ``add_precondition``: an action gains a precondition literal.
* ``extend_action_to_class``: an action accepts a new object class in one
  parameter slot. This is done by cloning the schema as ``<action>__<class>``
  with that slot retyped. A variant instead gives an existing action an
  extra delete effect (``clears``), for repairs by state change.
* ``assert_init_fact``: an atom is added to the problem's initial state.

``SurgeryLog`` records each edit with a unified diff and can replay the
sequence on pristine inputs.
"""

from __future__ import annotations

import difflib
import re
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .pddl import (
    ROOT_TYPE,
    PDDLSyntaxError,
    ActionSchema,
    DomainDescription,
    Literal,
    PredicateSchema,
    ProblemDescription,
    is_variable,
    serialize_domain,
    serialize_problem,
)
from .pddl.model import CLONE_SEPARATOR
from .pddl.sexpr import Atom, SList, read


class SurgeryError(Exception):
    pass


class UnknownAction(SurgeryError):
    pass


class UnknownType(SurgeryError):
    pass


class UnknownPredicate(SurgeryError):
    pass


class UnknownObject(SurgeryError):
    pass


class UnboundVariable(SurgeryError):
    pass


class ArityMismatch(SurgeryError):
    pass


class SurgeryWarning(UserWarning):
    pass


class DuplicateConjunct(SurgeryWarning):
    pass


class AlreadyApplicable(SurgeryWarning):
    pass


class DuplicateFact(SurgeryWarning):
    pass


class AutoDeclared(SurgeryWarning):
    pass


@dataclass(frozen=True)
class AffordanceFact:
    """``object_class`` can fill parameter ``role`` of ``action``.

    With ``clears`` set, the fact instead says that ``action`` removes that
    literal (over the action's variables), e.g. washing a cup clears
    ``(is_dirty ?c)``.
    """

    object_class: str
    action: str
    role: int
    provenance: str | None = None
    clears: Literal | None = None

    def check(self, d: DomainDescription) -> ActionSchema:
        schema = d.action(self.action)
        if schema is None:
            raise UnknownAction(self.action)
        if not 0 <= self.role < len(schema.params):
            raise SurgeryError(f"{self.action} has no parameter {self.role}")
        return schema


def _note(notes: list | None, category: type[SurgeryWarning], message: str) -> None:
    """Record a notice, or emit it as a warning when the caller keeps no list."""
    if notes is None:
        warnings.warn(message, category, stacklevel=3)
    else:
        notes.append((category, message))


def clone_name(action: str, object_class: str) -> str:
    return f"{action.split(CLONE_SEPARATOR, 1)[0]}{CLONE_SEPARATOR}{object_class}"


def _replace_action(d: DomainDescription, new: ActionSchema) -> DomainDescription:
    return replace(d, actions=tuple(new if a.name == new.name else a for a in d.actions))


def _declare_predicate(d: DomainDescription, lit: Literal, notes: list | None) -> DomainDescription:
    """Declare ``lit``'s predicate with root-typed parameters."""
    names = []
    for i, arg in enumerate(lit.args):
        v = arg if is_variable(arg) and arg not in names else f"?x{i + 1}"
        names.append(v)
    _note(notes, AutoDeclared, f"declared new predicate {lit.predicate}/{len(names)}")
    schema = PredicateSchema(lit.predicate, tuple((v, ROOT_TYPE) for v in names))
    return replace(d, predicates=d.predicates + (schema,))


def add_precondition(
    d: DomainDescription, action: str, lit: Literal, *, notes: list | None = None
) -> DomainDescription:
    """Conjoin ``lit`` to ``action``'s precondition.

    An undeclared predicate is declared on the fly. Adding a conjunct that
    is already present returns ``d`` itself and warns ``DuplicateConjunct``.
    """
    schema = d.action(action)
    if schema is None:
        raise UnknownAction(action)
    for v in lit.variables:
        if v not in schema.variables:
            raise UnboundVariable(f"{v} is not a parameter of {action}")
    pred = d.predicate(lit.predicate)
    if pred is not None and pred.arity != len(lit.args):
        raise ArityMismatch(f"{lit.predicate} takes {pred.arity} arguments, got {len(lit.args)}")
    if lit in schema.precondition:
        _note(notes, DuplicateConjunct, f"{lit} already in {action}'s precondition")
        return d
    if pred is None:
        d = _declare_predicate(d, lit, notes)
    return _replace_action(d, replace(schema, precondition=schema.precondition.with_literal(lit)))


def _fresh_variable(schema: ActionSchema, old: str, object_class: str) -> str:
    candidate = "?" + object_class[0]
    taken = set(schema.variables) - {old}
    return old if candidate in taken else candidate


def _generalize_predicates(d: DomainDescription, clone: ActionSchema, var: str, cls: str) -> DomainDescription:
    """Widen predicate parameter types so ``var`` of type ``cls`` fits every literal."""
    widened: dict[str, PredicateSchema] = {}
    for lit in (*clone.precondition, *clone.effect):
        pred = widened.get(lit.predicate) or d.predicate(lit.predicate)
        if pred is None:
            continue
        params = list(pred.params)
        for i, arg in enumerate(lit.args):
            if arg == var and not d.is_subtype(cls, params[i][1]):
                params[i] = (params[i][0], d.common_ancestor(params[i][1], cls))
        if tuple(params) != pred.params:
            widened[pred.name] = PredicateSchema(pred.name, tuple(params))
    if not widened:
        return d
    return replace(d, predicates=tuple(widened.get(p.name, p) for p in d.predicates))


def extend_action_to_class(
    d: DomainDescription, fact: AffordanceFact, *, notes: list | None = None
) -> DomainDescription:
    schema = fact.check(d)
    if fact.clears is not None:
        return _add_clearing_effect(d, schema, fact, notes)
    cls = fact.object_class
    if not d.has_type(cls):
        raise UnknownType(cls)
    old_var, old_type = schema.params[fact.role]
    name = clone_name(schema.name, cls)
    if d.is_subtype(cls, old_type) or d.action(name) is not None:
        _note(notes, AlreadyApplicable, f"{cls} already fits {schema.name} {old_var}")
        return d
    new_var = _fresh_variable(schema, old_var, cls)
    mapping = {old_var: new_var}
    params = list((mapping.get(v, v), t) for v, t in schema.params)
    params[fact.role] = (new_var, cls)
    clone = ActionSchema(
        name,
        tuple(params),
        schema.precondition.substitute(mapping),
        schema.effect.substitute(mapping),
    )
    d = _generalize_predicates(d, clone, new_var, cls)
    # the clone goes after the original and any earlier clones of it
    actions = list(d.actions)
    at = max(i for i, a in enumerate(actions) if a.base_name == schema.base_name) + 1
    actions.insert(at, clone)
    return replace(d, actions=tuple(actions))


def _add_clearing_effect(
    d: DomainDescription, schema: ActionSchema, fact: AffordanceFact, notes: list | None
) -> DomainDescription:
    lit = fact.clears.atom.negate()
    for v in lit.variables:
        if v not in schema.variables:
            raise UnboundVariable(f"{v} is not a parameter of {schema.name}")
    if lit in schema.effect:
        _note(notes, AlreadyApplicable, f"{schema.name} already clears {lit.atom}")
        return d
    if lit.atom in schema.effect:
        raise SurgeryError(f"{schema.name} both adds and deletes {lit.atom}")
    if d.predicate(lit.predicate) is None:
        d = _declare_predicate(d, lit, notes)
    return _replace_action(d, replace(schema, effect=schema.effect.with_literal(lit)))


def assert_init_fact(
    p: ProblemDescription,
    atom: Literal,
    d: DomainDescription,
    object_types: Mapping[str, str] | None = None,
    *,
    notes: list | None = None,
) -> ProblemDescription:
    """Add ``atom`` to ``p``'s initial state.

    An argument that is not yet an object is declared when its type is
    known, either from ``object_types`` or because the name is itself a
    declared type (``bowl`` becomes ``bowl - bowl``).
    """
    if not atom.positive or not atom.is_ground:
        raise SurgeryError(f"init facts are positive ground atoms, got {atom}")
    pred = d.predicate(atom.predicate)
    if pred is None:
        raise UnknownPredicate(atom.predicate)
    if pred.arity != len(atom.args):
        raise ArityMismatch(f"{atom.predicate} takes {pred.arity} arguments, got {len(atom.args)}")
    known = dict(d.constants) | p.object_types
    hints = dict(object_types or {})
    objects = list(p.objects)
    for arg in atom.args:
        if arg in known:
            continue
        t = hints.get(arg) or (arg if d.has_type(arg) and arg != ROOT_TYPE else None)
        if t is None or not d.has_type(t):
            raise UnknownObject(arg)
        _note(notes, AutoDeclared, f"declared object {arg} - {t}")
        objects.append((arg, t))
        known[arg] = t
    if atom in p.init:
        _note(notes, DuplicateFact, f"{atom} already in init")
        return p
    return ProblemDescription(p.name, p.domain_name, tuple(objects), p.init + (atom,), p.goal)


# -- log and replay ---------------------------------------------------------


@dataclass(frozen=True)
class Mutation:
    kind: str  # "precondition-added" | "action-extended" | "init-fact-asserted"
    action: str | None = None
    literal: Literal | None = None
    fact: AffordanceFact | None = None
    object_types: tuple[tuple[str, str], ...] = ()

    def apply(self, d: DomainDescription, p: ProblemDescription, notes: list | None = None):
        if self.kind == "precondition-added":
            return add_precondition(d, self.action, self.literal, notes=notes), p
        if self.kind == "action-extended":
            return extend_action_to_class(d, self.fact, notes=notes), p
        if self.kind == "init-fact-asserted":
            return d, assert_init_fact(p, self.literal, d, dict(self.object_types), notes=notes)
        raise ValueError(f"unknown mutation kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "precondition-added":
            return f"precondition {self.action} {self.literal}"
        if self.kind == "action-extended":
            f = self.fact
            if f.clears is not None:
                return f"clears {f.action} {f.role} {f.clears}"
            return f"extend {f.action} {f.role} {f.object_class}"
        hints = " ".join(f"{n}={t}" for n, t in self.object_types)
        return f"init {self.literal}" + (f" {hints}" if hints else "")


@dataclass(frozen=True)
class LogEntry:
    mutation: Mutation
    diff: str
    warned: bool = False


def unified_diff(before: str, after: str, name: str) -> str:
    return "".join(
        difflib.unified_diff(
            before.splitlines(keepends=True),
            after.splitlines(keepends=True),
            f"a/{name}",
            f"b/{name}",
        )
    )


@dataclass
class SurgeryLog:
    """Ordered record of applied mutations.

    ``apply`` is the one entry point the engine uses, so every change to
    the pair is captured along with its diff.
    """

    entries: list[LogEntry] = field(default_factory=list)

    def apply(self, mutation: Mutation, d: DomainDescription, p: ProblemDescription):
        notes: list = []
        d2, p2 = mutation.apply(d, p, notes)
        noop = any(issubclass(c, (DuplicateConjunct, AlreadyApplicable, DuplicateFact)) for c, _ in notes)
        if d2 is not d:
            diff = unified_diff(serialize_domain(d), serialize_domain(d2), "domain.pddl")
        else:
            diff = unified_diff(serialize_problem(p), serialize_problem(p2), "problem.pddl")
        self.entries.append(LogEntry(mutation, diff, noop))
        return d2, p2

    def replay(self, d: DomainDescription, p: ProblemDescription):
        for entry in self.entries:
            d, p = entry.mutation.apply(d, p, [])
        return d, p

    def __len__(self) -> int:
        return len(self.entries)

    def count(self, kind: str) -> int:
        return sum(1 for e in self.entries if e.mutation.kind == kind and not e.warned)

    def to_json(self) -> list[dict]:
        return [{"kind": e.mutation.kind, "change": e.mutation.describe(), "noop": e.warned, "diff": e.diff} for e in self.entries]


# -- mutation scripts -------------------------------------------------------

_HINT = re.compile(r"^([a-z0-9_\-]+)=([a-z0-9_\-]+)$")


def _literal_from(expr) -> Literal:
    if isinstance(expr, SList) and expr.head() == "not" and len(expr) == 2:
        return _literal_from(expr[1]).negate()
    if not isinstance(expr, SList) or not expr or not all(isinstance(x, Atom) for x in expr):
        raise ValueError(f"expected a literal, got {expr}")
    return Literal(expr[0].text, tuple(x.text for x in expr.items[1:]))


def parse_script(text: str, d: DomainDescription | None = None) -> list[Mutation]:
    """Read a line-oriented mutation script.

    ::

        precondition fill (not (is_dirty ?c))
        extend fill ?c bowl
        clears wash ?c (is_dirty ?c)
        init (is_dirty cup)
        init (obj_at bowl kitchen) bowl=bowl

    A role may be a parameter variable (needs ``d``) or a 0-based index.
    Blank lines and ``;`` comments are ignored.
    """
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        verb, _, rest = line.partition(" ")
        verb = verb.lower()
        try:
            if verb == "precondition":
                action, _, lit = rest.strip().partition(" ")
                out.append(Mutation("precondition-added", action.lower(), _literal_from(read(lit))))
            elif verb in ("extend", "clears"):
                action, role, arg = rest.split(None, 2)
                idx = _role_index(action.lower(), role.lower(), d)
                if verb == "extend":
                    fact = AffordanceFact(arg.strip().lower(), action.lower(), idx)
                else:
                    lit = _literal_from(read(arg))
                    fact = AffordanceFact(_role_type(action.lower(), idx, d), action.lower(), idx, clears=lit)
                out.append(Mutation("action-extended", fact=fact))
            elif verb == "init":
                close = rest.rindex(")") + 1
                lit = _literal_from(read(rest[:close]))
                hints = []
                for tok in rest[close:].split():
                    m = _HINT.match(tok.lower())
                    if not m:
                        raise ValueError(f"bad object hint {tok!r}")
                    hints.append((m.group(1), m.group(2)))
                out.append(Mutation("init-fact-asserted", literal=lit, object_types=tuple(hints)))
            else:
                raise ValueError(f"unknown mutation {verb!r}")
        except (ValueError, IndexError, SurgeryError, PDDLSyntaxError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return out


def _role_index(action: str, role: str, d: DomainDescription | None) -> int:
    if role.isdigit():
        return int(role)
    if d is None or d.action(action) is None:
        raise UnknownAction(action)
    try:
        return d.action(action).param_index(role)
    except ValueError:
        raise UnboundVariable(f"{role} is not a parameter of {action}") from None


def _role_type(action: str, idx: int, d: DomainDescription | None) -> str:
    if d is None or d.action(action) is None:
        raise UnknownAction(action)
    return d.action(action).params[idx][1]


def apply_script(
    mutations: Iterable[Mutation], d: DomainDescription, p: ProblemDescription, log: SurgeryLog | None = None
):
    log = log if log is not None else SurgeryLog()
    for m in mutations:
        d, p = log.apply(m, d, p)
    return d, p, log
