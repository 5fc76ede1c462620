"""Parse and validate PDDL domain and problem files.

Only ``:strips``, ``:typing`` and ``:negative-preconditions`` are accepted.
Anything else (quantifiers, disjunction, conditional effects, numeric
fluents, durative actions) is rejected with :class:`UnsupportedFeature`.
"""

from __future__ import annotations

from .errors import PDDLSyntaxError, SemanticError, UnsupportedFeature
from .model import (
    ROOT_TYPE,
    ActionSchema,
    Condition,
    DomainDescription,
    Literal,
    PredicateSchema,
    ProblemDescription,
    is_variable,
)
from .sexpr import Atom, SExpr, SList, read

SUPPORTED_REQUIREMENTS = (":strips", ":typing", ":negative-preconditions")
_UNSUPPORTED_CONNECTIVES = {
    "or", "imply", "forall", "exists", "when", "=", "increase", "decrease",
    "assign", "scale-up", "scale-down", "either", "preference",
}
_UNSUPPORTED_SECTIONS = {":functions", ":durative-action", ":derived", ":process", ":event"}


def _where(expr: SExpr) -> str:
    return f" (line {expr.line}, column {expr.column})"


def _atom(expr: SExpr, what: str) -> str:
    if not isinstance(expr, Atom):
        raise PDDLSyntaxError(f"expected {what}, found a list", expr.line, expr.column)
    return expr.text


def _list(expr: SExpr, what: str) -> SList:
    if not isinstance(expr, SList):
        raise PDDLSyntaxError(f"expected {what}, found '{expr.text}'", expr.line, expr.column)
    return expr


def _typed_list(items, what: str) -> list[tuple[str, str]]:
    """``a b - t c`` -> [(a, t), (b, t), (c, object)]."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    it = iter(items)
    for item in it:
        text = _atom(item, what)
        if text == "-":
            try:
                parent = next(it)
            except StopIteration:
                raise PDDLSyntaxError(f"dangling '-' in {what}", item.line, item.column) from None
            if isinstance(parent, SList):
                head = parent.head()
                if head == "either":
                    raise UnsupportedFeature("'either' types are not supported" + _where(parent))
                raise PDDLSyntaxError(f"expected a type name in {what}", parent.line, parent.column)
            if not pending:
                raise PDDLSyntaxError(f"'-' without names in {what}", item.line, item.column)
            out.extend((name, parent.text) for name in pending)
            pending = []
        else:
            pending.append(text)
    out.extend((name, ROOT_TYPE) for name in pending)
    return out


def _check_define(expr: SExpr, kind: str) -> tuple[str, list[SExpr]]:
    top = _list(expr, "(define ...)")
    if top.head() != "define":
        raise PDDLSyntaxError("expected (define ...)", top.line, top.column)
    if len(top) < 2:
        raise PDDLSyntaxError(f"missing ({kind} name)", top.line, top.column)
    header = _list(top[1], f"({kind} name)")
    if header.head() != kind or len(header) != 2:
        raise PDDLSyntaxError(f"expected ({kind} name)", header.line, header.column)
    return _atom(header[1], f"{kind} name"), list(top.items[2:])


def _parse_literal(expr: SExpr, negated_ok: bool) -> Literal:
    lst = _list(expr, "literal")
    head = lst.head()
    if head is None:
        raise PDDLSyntaxError("literal must start with a predicate name", lst.line, lst.column)
    if head == "not":
        if not negated_ok:
            raise SemanticError("negative literal not allowed here" + _where(lst))
        if len(lst) != 2:
            raise PDDLSyntaxError("(not ...) takes exactly one literal", lst.line, lst.column)
        inner = _parse_literal(lst[1], negated_ok=False)
        return inner.negate()
    if head in _UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeature(f"'{head}' is outside the supported PDDL subset" + _where(lst))
    if head == "and":
        raise PDDLSyntaxError("nested (and ...) where a literal was expected", lst.line, lst.column)
    args = tuple(_atom(a, "term") for a in lst.items[1:])
    return Literal(head, args, True)


def _parse_conjunction(expr: SExpr, negated_ok: bool = True) -> Condition:
    lst = _list(expr, "condition")
    if len(lst) == 0:
        return Condition()
    if lst.head() != "and":
        return Condition((_parse_literal(lst, negated_ok),))
    out: list[Literal] = []
    for item in lst.items[1:]:
        sub = _list(item, "literal")
        if sub.head() == "and":
            out.extend(_parse_conjunction(sub, negated_ok))
        else:
            out.append(_parse_literal(sub, negated_ok))
    return Condition(tuple(out))


def _validate_types(types: list[tuple[str, str]]) -> None:
    parents: dict[str, str] = {}
    for name, parent in types:
        if name == ROOT_TYPE:
            raise SemanticError("'object' is the implicit root type and cannot be redeclared")
        if name in parents and parents[name] != parent:
            raise SemanticError(f"type {name} declared with two parents ({parents[name]}, {parent})")
        parents[name] = parent
    for name, parent in parents.items():
        if parent != ROOT_TYPE and parent not in parents:
            raise SemanticError(f"type {name} has undeclared parent type {parent}")
    for name in parents:
        seen = {name}
        cur = parents[name]
        while cur != ROOT_TYPE:
            if cur in seen:
                raise SemanticError(f"type hierarchy has a cycle through {name}")
            seen.add(cur)
            cur = parents[cur]


def _check_literal(lit: Literal, domain_preds: dict[str, PredicateSchema], context: str) -> None:
    schema = domain_preds.get(lit.predicate)
    if schema is None:
        raise SemanticError(f"{context}: undeclared predicate {lit.predicate}")
    if schema.arity != len(lit.args):
        raise SemanticError(
            f"{context}: arity mismatch for {lit.predicate} "
            f"(declared {schema.arity}, used with {len(lit.args)})"
        )


def validate_domain(domain: DomainDescription) -> None:
    """Raise :class:`SemanticError` unless every domain invariant holds."""
    _validate_types(list(domain.types))
    known_types = {ROOT_TYPE, *domain.type_parents}

    def need_type(t: str, context: str) -> None:
        if t not in known_types:
            raise SemanticError(f"{context}: undeclared type {t}")

    for req in domain.requirements:
        if req not in SUPPORTED_REQUIREMENTS:
            raise UnsupportedFeature(f"requirement {req} is not supported")

    constants: dict[str, str] = {}
    for name, t in domain.constants:
        need_type(t, f"constant {name}")
        if name in constants:
            raise SemanticError(f"constant {name} declared twice")
        constants[name] = t

    preds: dict[str, PredicateSchema] = {}
    for p in domain.predicates:
        if not p.name:
            raise SemanticError("predicate with empty name")
        if p.name in preds:
            raise SemanticError(f"predicate {p.name} declared twice")
        names = [v for v, _ in p.params]
        if len(set(names)) != len(names):
            raise SemanticError(f"predicate {p.name} repeats a parameter name")
        for v, t in p.params:
            if not is_variable(v):
                raise SemanticError(f"predicate {p.name}: parameter {v} must start with '?'")
            need_type(t, f"predicate {p.name}")
        preds[p.name] = p

    seen_actions: set[str] = set()
    for a in domain.actions:
        if a.name in seen_actions:
            raise SemanticError(f"action {a.name} declared twice")
        seen_actions.add(a.name)
        names = [v for v, _ in a.params]
        if len(set(names)) != len(names):
            raise SemanticError(f"action {a.name} repeats a parameter name")
        for v, t in a.params:
            if not is_variable(v):
                raise SemanticError(f"action {a.name}: parameter {v} must start with '?'")
            need_type(t, f"action {a.name}")
        params = set(names)
        for part, cond in (("precondition", a.precondition), ("effect", a.effect)):
            for lit in cond:
                _check_literal(lit, preds, f"action {a.name} {part}")
                for term in lit.args:
                    if is_variable(term):
                        if term not in params:
                            raise SemanticError(
                                f"action {a.name} {part}: unbound variable {term} in {lit}"
                            )
                    elif term not in constants:
                        raise SemanticError(
                            f"action {a.name} {part}: unknown constant {term} in {lit}"
                        )
        adds = {l.atom for l in a.effect.positive}
        for lit in a.effect.negative:
            if lit.atom in adds:
                raise SemanticError(f"action {a.name} both adds and deletes {lit.atom}")


def parse_domain(text: str) -> DomainDescription:
    name, sections = _check_define(read(text), "domain")
    requirements: list[str] = []
    types: list[tuple[str, str]] = []
    constants: list[tuple[str, str]] = []
    predicates: list[PredicateSchema] = []
    actions: list[ActionSchema] = []

    for section in sections:
        sec = _list(section, "domain section")
        key = sec.head()
        if key == ":requirements":
            requirements.extend(_atom(r, "requirement") for r in sec.items[1:])
        elif key == ":types":
            types.extend(_typed_list(sec.items[1:], ":types"))
        elif key in (":constants",):
            constants.extend(_typed_list(sec.items[1:], ":constants"))
        elif key == ":predicates":
            for p in sec.items[1:]:
                pl = _list(p, "predicate declaration")
                pname = pl.head()
                if pname is None:
                    raise PDDLSyntaxError("predicate declaration needs a name", pl.line, pl.column)
                predicates.append(PredicateSchema(pname, tuple(_typed_list(pl.items[1:], pname))))
        elif key == ":action":
            actions.append(_parse_action(sec))
        elif key in _UNSUPPORTED_SECTIONS:
            raise UnsupportedFeature(f"section {key} is not supported" + _where(sec))
        else:
            raise PDDLSyntaxError(f"unknown domain section {key!r}", sec.line, sec.column)

    domain = DomainDescription(
        name=name,
        requirements=tuple(requirements),
        types=tuple(types),
        constants=tuple(constants),
        predicates=tuple(predicates),
        actions=tuple(actions),
    )
    validate_domain(domain)
    return domain


def _parse_action(sec: SList) -> ActionSchema:
    if len(sec) < 2:
        raise PDDLSyntaxError("(:action ...) needs a name", sec.line, sec.column)
    name = _atom(sec[1], "action name")
    params: list[tuple[str, str]] = []
    pre = Condition()
    eff = Condition()
    rest = list(sec.items[2:])
    if len(rest) % 2:
        raise PDDLSyntaxError(f"action {name}: keyword without a value", sec.line, sec.column)
    for key_expr, value in zip(rest[::2], rest[1::2]):
        key = _atom(key_expr, "action keyword")
        if key == ":parameters":
            params = _typed_list(_list(value, ":parameters list").items, f"{name} parameters")
        elif key == ":precondition":
            pre = _parse_conjunction(value, negated_ok=True)
        elif key == ":effect":
            eff = _parse_conjunction(value, negated_ok=True)
        else:
            raise PDDLSyntaxError(f"action {name}: unknown keyword {key}", key_expr.line, key_expr.column)
    return ActionSchema(name, tuple(params), pre, eff)


def validate_problem(problem: ProblemDescription, domain: DomainDescription) -> None:
    if problem.domain_name != domain.name:
        raise SemanticError(
            f"problem {problem.name} is for domain {problem.domain_name}, not {domain.name}"
        )
    known: dict[str, str] = dict(domain.constants)
    for obj, t in problem.objects:
        if not domain.has_type(t):
            raise SemanticError(f"object {obj} has unknown type {t}")
        if obj in known:
            raise SemanticError(f"object {obj} declared twice")
        known[obj] = t
    preds = {p.name: p for p in domain.predicates}
    for part, lits in (("init", problem.init), ("goal", tuple(problem.goal))):
        for lit in lits:
            _check_literal(lit, preds, f"problem {part}")
            for term in lit.args:
                if is_variable(term):
                    raise SemanticError(f"problem {part}: variable {term} in {lit}")
                if term not in known:
                    raise SemanticError(f"problem {part}: undeclared object {term} in {lit}")
            if part == "init" and not lit.positive:
                raise SemanticError(f"init holds positive atoms only, got {lit}")


def parse_problem(text: str, domain: DomainDescription) -> ProblemDescription:
    name, sections = _check_define(read(text), "problem")
    domain_name = None
    objects: list[tuple[str, str]] = []
    init: list[Literal] = []
    goal = Condition()
    for section in sections:
        sec = _list(section, "problem section")
        key = sec.head()
        if key == ":domain":
            if len(sec) != 2:
                raise PDDLSyntaxError("expected (:domain name)", sec.line, sec.column)
            domain_name = _atom(sec[1], "domain name")
        elif key == ":objects":
            objects.extend(_typed_list(sec.items[1:], ":objects"))
        elif key == ":init":
            for item in sec.items[1:]:
                lit = _parse_literal(item, negated_ok=True)
                if not lit.positive:
                    raise SemanticError("init holds positive atoms only" + _where(item))
                init.append(lit)
        elif key == ":goal":
            if len(sec) != 2:
                raise PDDLSyntaxError("expected (:goal condition)", sec.line, sec.column)
            goal = _parse_conjunction(sec[1], negated_ok=True)
        elif key in (":requirements",):
            continue
        elif key == ":metric":
            raise UnsupportedFeature("plan metrics are not supported" + _where(sec))
        else:
            raise PDDLSyntaxError(f"unknown problem section {key!r}", sec.line, sec.column)
    if domain_name is None:
        raise SemanticError(f"problem {name} does not name its domain")
    problem = ProblemDescription(name, domain_name, tuple(objects), tuple(init), goal)
    validate_problem(problem, domain)
    return problem
