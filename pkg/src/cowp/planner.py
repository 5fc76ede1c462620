"""Satisficing forward state-space planner and plan validator.

Greedy best-first search ordered by the additive delete-relaxation
heuristic (h_add), ties broken by insertion order. Negative preconditions
are evaluated directly against the closed-world state and ignored by the
relaxation, which keeps relaxed dead-end pruning sound. When h is zero
everywhere the queue degenerates to FIFO, i.e. uniform-cost search on
unit-cost actions.
"""

from __future__ import annotations

import enum
import heapq
import re
from dataclasses import dataclass, field
from itertools import count

from .pddl import (
    DEFAULT_CAPACITY,
    DomainDescription,
    GroundAction,
    Literal,
    PreconditionViolation,
    ProblemDescription,
    WorldState,
    apply,
    first_unsatisfied,
    ground,
    holds,
    instantiate,
)
from .pddl.semantics import typed_objects

DEFAULT_NODE_BUDGET = 10**6
INF = float("inf")


@dataclass(frozen=True)
class Plan:
    steps: tuple[GroundAction, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def format(self, start: int = 1) -> str:
        """One ``S<k>: action args`` line per step."""
        return "\n".join(f"S{i}: {a.display()}" for i, a in enumerate(self.steps, start))

    def names(self) -> list[str]:
        return [a.display() for a in self.steps]


class PlanStatus(enum.Enum):
    FOUND = "found"
    NO_SOLUTION = "no_solution"
    RESOURCE_EXHAUSTED = "resource_exhausted"


@dataclass(frozen=True)
class PlannerOutcome:
    status: PlanStatus
    plan: Plan | None = None
    expanded: int = 0

    @property
    def found(self) -> bool:
        return self.status is PlanStatus.FOUND


@dataclass
class _Task:
    """Integer-encoded ground task."""

    actions: list[GroundAction]
    pre_pos: list[frozenset[int]]
    pre_neg: list[frozenset[int]]
    add: list[frozenset[int]]
    dele: list[frozenset[int]]
    goal_pos: frozenset[int]
    goal_neg: frozenset[int]
    init: frozenset[int]
    by_pre: dict[int, list[int]] = field(default_factory=dict)
    no_pre: list[int] = field(default_factory=list)


def _encode(actions: list[GroundAction], p: ProblemDescription) -> _Task:
    ids: dict[Literal, int] = {}

    def enc(lits) -> frozenset[int]:
        return frozenset(ids.setdefault(l.atom, len(ids)) for l in lits)

    task = _Task(
        actions=actions,
        pre_pos=[enc(a.precondition.positive) for a in actions],
        pre_neg=[enc(a.precondition.negative) for a in actions],
        add=[enc(a.effect.positive) for a in actions],
        dele=[enc(a.effect.negative) for a in actions],
        goal_pos=enc(p.goal.positive),
        goal_neg=enc(p.goal.negative),
        init=enc(p.init),
    )
    for i, pre in enumerate(task.pre_pos):
        if not pre:
            task.no_pre.append(i)
        for atom in pre:
            task.by_pre.setdefault(atom, []).append(i)
    return task


def _h_add(task: _Task, state: frozenset[int]) -> float:
    cost: dict[int, float] = {atom: 0 for atom in state}
    heap = [(0, atom) for atom in state]
    waiting = [len(pre) for pre in task.pre_pos]
    acc = [0.0] * len(task.actions)

    def fire(i: int) -> None:
        c = acc[i] + 1
        for q in task.add[i]:
            if c < cost.get(q, INF):
                cost[q] = c
                heapq.heappush(heap, (c, q))

    for i in task.no_pre:
        fire(i)
    done: set[int] = set()
    while heap:
        c, atom = heapq.heappop(heap)
        if atom in done or c > cost[atom]:
            continue
        done.add(atom)
        for i in task.by_pre.get(atom, ()):
            waiting[i] -= 1
            acc[i] += c
            if waiting[i] == 0:
                fire(i)
    total = 0.0
    for g in task.goal_pos:
        if g not in cost:
            return INF
        total += cost[g]
    return total


def _is_goal(task: _Task, state: frozenset[int]) -> bool:
    return task.goal_pos <= state and not (task.goal_neg & state)


def plan(
    d: DomainDescription,
    p: ProblemDescription,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    capacity: int = DEFAULT_CAPACITY,
) -> PlannerOutcome:
    """Search for any plan from ``p.init`` to ``p.goal``.

    Returns NO_SOLUTION only after the reachable (relaxation-pruned) state
    space is exhausted; hitting ``node_budget`` gives RESOURCE_EXHAUSTED.
    """
    task = _encode(ground(d, p, capacity), p)
    tick = count()
    start = task.init
    parents: dict[frozenset[int], tuple[frozenset[int], int] | None] = {start: None}
    h0 = _h_add(task, start)
    if h0 == INF:
        return PlannerOutcome(PlanStatus.NO_SOLUTION, expanded=0)
    frontier = [(h0, next(tick), start)]
    closed: set[frozenset[int]] = set()
    expanded = 0
    n_actions = len(task.actions)

    while frontier:
        _, _, state = heapq.heappop(frontier)
        if state in closed:
            continue
        if _is_goal(task, state):
            return PlannerOutcome(PlanStatus.FOUND, _extract(task, parents, state), expanded)
        closed.add(state)
        expanded += 1
        if expanded > node_budget:
            return PlannerOutcome(PlanStatus.RESOURCE_EXHAUSTED, expanded=expanded)
        for i in range(n_actions):
            if not task.pre_pos[i] <= state or task.pre_neg[i] & state:
                continue
            succ = (state - task.dele[i]) | task.add[i]
            if succ in parents:
                continue
            parents[succ] = (state, i)
            h = _h_add(task, succ)
            if h == INF:
                closed.add(succ)
                continue
            heapq.heappush(frontier, (h, next(tick), succ))
    return PlannerOutcome(PlanStatus.NO_SOLUTION, expanded=expanded)


def _extract(task: _Task, parents, state) -> Plan:
    steps = []
    while parents[state] is not None:
        prev, i = parents[state]
        steps.append(task.actions[i])
        state = prev
    return Plan(tuple(reversed(steps)))


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    failed_step: int | None = None
    failed_literal: Literal | None = None
    message: str = ""
    final_state: WorldState | None = None

    def __bool__(self) -> bool:
        return self.valid


def validate_plan(d: DomainDescription, p: ProblemDescription, plan: Plan) -> ValidationReport:
    """Replay ``plan`` from ``p.init``; report the first failing step or goal literal.

    ``failed_step`` is 0-based; ``len(plan)`` means every step applied but
    the goal does not hold.
    """
    state = WorldState(p.init)
    for i, action in enumerate(plan):
        if d.action(action.schema) is None:
            return ValidationReport(False, i, None, f"step {i + 1}: unknown action {action.schema}")
        try:
            state = apply(state, action)
        except PreconditionViolation as exc:
            return ValidationReport(
                False, i, exc.literal, f"step {i + 1} ({action.display()}): {exc.literal} does not hold"
            )
    if not holds(state, p.goal):
        lit = first_unsatisfied(state, p.goal)
        return ValidationReport(False, len(plan), lit, f"goal literal {lit} does not hold", state)
    return ValidationReport(True, final_state=state)


_STEP = re.compile(r"^\s*(?:S\d+\s*:\s*)?\(?\s*([^()]+?)\s*\)?\s*$", re.IGNORECASE)


def parse_plan_text(text: str, d: DomainDescription, p: ProblemDescription) -> Plan:
    """Read a plan in ``S1: find robot cup kitchen`` or ``(find robot cup kitchen)`` form.

    A step naming a base action resolves to the first schema variant
    (original or clone) whose parameter types accept the arguments.
    """
    objects = dict(typed_objects(d, p))
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        m = _STEP.match(line)
        if not m:
            raise ValueError(f"line {lineno}: cannot read plan step {raw!r}")
        name, *args = m.group(1).lower().split()
        for schema in _variants(d, name):
            if len(schema.params) != len(args):
                continue
            if all(
                a in objects and d.is_subtype(objects[a], t) for a, (_, t) in zip(args, schema.params)
            ):
                steps.append(instantiate(schema, tuple(args)))
                break
        else:
            raise ValueError(f"line {lineno}: no action matches {m.group(1)!r}")
    return Plan(tuple(steps))


def _variants(d: DomainDescription, name: str):
    exact = d.action(name)
    if exact is not None:
        yield exact
    for a in d.actions:
        if a.name != name and a.base_name == name:
            yield a
