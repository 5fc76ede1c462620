"""The open-world planning loop.

Plan once, then before every action check for a newly observed situation.
When one appears, the oracle is asked about each remaining action. If an
action is judged infeasible, the situation becomes a precondition of that
action and a fact of the current state, and the robot replans from where
it stands. If no plan exists, the oracle is asked which available objects
could stand in. Each accepted answer is tried as a domain extension, and
the oracle picks among the plans that result. Otherwise the episode ends
with no solution.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Protocol

from .acquirer import Candidate, acquire_affordances, acquire_state_changes, choose_role, fits_role, select_best
from .monitor import FeasibilityVerdict, monitor_plan
from .oracle import (
    AuthError,
    Lexicon,
    Oracle,
    OracleError,
    OracleExchange,
    Phrasebook,
    UnmappableSituation,
    situation_to_predicate,
    symbolize_with_oracle,
)
from .oracle.nl import MissingPattern
from .pddl import (
    DomainDescription,
    GroundAction,
    Literal,
    PDDLError,
    ProblemDescription,
    WorldState,
    apply,
    holds,
    serialize_domain,
)
from .planner import DEFAULT_NODE_BUDGET, Plan, PlanStatus, plan, validate_plan
from .surgery import (
    AffordanceFact,
    Mutation,
    SurgeryError,
    SurgeryLog,
    UnknownType,
)

log = logging.getLogger(__name__)


class Outcome(str, enum.Enum):
    COMPLETED = "completed"
    NO_SOLUTION = "no_solution"
    FAILED = "failed"


class Environment(Protocol):
    def observe(self, step: int) -> str | None:
        """Called before executing step ``step``; returns a newly observed situation."""

    def situation_active(self) -> bool: ...

    def execute(self, action: GroundAction) -> str | None:
        """Carry out ``action``; ``None`` on success, else the failure reason."""

    def available_objects(self) -> list[tuple[str, str]]: ...

    def spawn_facts(self, name: str, type_name: str) -> list[Literal]: ...


@dataclass(frozen=True)
class EngineConfig:
    task_nl: str
    book: Phrasebook
    lexicon: Lexicon | None = None
    symbolizer: str = "lexicon"  # or "oracle"
    fewshot: str = ""
    repair_actions: tuple[str, ...] = ()
    node_budget: int = DEFAULT_NODE_BUDGET
    acquisition_rounds: int = 3
    max_planner_calls: int = 512
    max_steps: int = 256

    def __post_init__(self):
        if self.symbolizer not in ("lexicon", "oracle"):
            raise ValueError(f"unknown symbolizer {self.symbolizer!r}")
        for name in ("node_budget", "acquisition_rounds", "max_planner_calls", "max_steps"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class EpisodeResult:
    outcome: Outcome
    reason: str = ""
    executed: tuple[str, ...] = ()
    situation: str | None = None
    symbol: str | None = None
    encountered: int = 0
    infeasible: bool = False
    handled: int = 0
    plans: tuple[tuple[str, ...], ...] = ()
    surgeries: tuple[dict, ...] = ()
    exchanges: tuple[OracleExchange, ...] = ()
    cause: str = ""  # for failures: "resource", "transport", "auth", "execution" or "fault"
    events: tuple[dict, ...] = ()
    final_domain: str = ""

    @property
    def completed(self) -> bool:
        return self.outcome is Outcome.COMPLETED

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "reason": self.reason,
            "cause": self.cause,
            "executed": list(self.executed),
            "situation": self.situation,
            "symbol": self.symbol,
            "encountered": self.encountered,
            "infeasible": self.infeasible,
            "handled": self.handled,
            "plans": [list(p) for p in self.plans],
            "surgeries": list(self.surgeries),
            "exchanges": [e.to_json() for e in self.exchanges],
            "events": list(self.events),
        }

    def transcript(self) -> str:
        lines = []
        for k, p in enumerate(self.plans):
            lines.append("initial plan:" if k == 0 else f"replan {k}:")
            lines.extend(f"  S{i}: {s}" for i, s in enumerate(p, 1))
        if self.situation:
            lines.append(f"situation: {self.situation} -> {self.symbol or 'unsymbolized'}")
        for e in self.exchanges:
            lines.append(f"  [{e.id}] {e.prompt.splitlines()[-1]} -> {e.completion.strip()} ({e.verdict})")
        for s in self.surgeries:
            lines.append(f"surgery: {s['change']}")
        lines.append("executed:")
        lines.extend(f"  {s}" for s in self.executed)
        tail = f" ({self.reason})" if self.reason else ""
        lines.append(f"outcome: {self.outcome.value}{tail}")
        return "\n".join(lines)


class _Stop(Exception):
    def __init__(self, outcome: Outcome, reason: str, cause: str = ""):
        self.outcome = outcome
        self.reason = reason
        self.cause = cause


@dataclass
class _Episode:
    domain: DomainDescription
    problem: ProblemDescription  # init tracks the robot's belief state
    env: Environment
    oracle: Oracle
    cfg: EngineConfig
    surgery: SurgeryLog = field(default_factory=SurgeryLog)
    plans: list[Plan] = field(default_factory=list)
    executed: list[GroundAction] = field(default_factory=list)
    planner_calls: int = 0
    situation: str | None = None
    symbol: Literal | None = None
    infeasible: bool = False
    rounds: int = 0
    blocked: set = field(default_factory=set)
    events: list[dict] = field(default_factory=list)

    def _event(self, kind: str, **info) -> None:
        self.events.append({"event": kind, "executed": len(self.executed), **info})

    # -- planning ---------------------------------------------------------

    def _plan(self, d: DomainDescription, p: ProblemDescription):
        self.planner_calls += 1
        if self.planner_calls > self.cfg.max_planner_calls:
            raise _Stop(Outcome.FAILED, "watchdog: planner call budget exceeded", "resource")
        out = plan(d, p, node_budget=self.cfg.node_budget)
        if out.status is PlanStatus.RESOURCE_EXHAUSTED:
            raise _Stop(Outcome.FAILED, f"planner budget exhausted after {out.expanded} expansions", "resource")
        return out

    def _adopt(self, new_plan: Plan) -> Plan:
        self.plans.append(new_plan)
        return new_plan

    # -- situation handling ---------------------------------------------

    def _symbolize(self) -> Literal:
        if self.symbol is not None:
            return self.symbol
        objects = list(self.problem.objects)
        try:
            if self.cfg.symbolizer == "oracle":
                sym = symbolize_with_oracle(self.oracle, self.cfg.fewshot, self.situation, self.domain, objects)
            else:
                sym = situation_to_predicate(self.situation, self.domain, objects, self.cfg.lexicon)
        except UnmappableSituation as exc:
            raise _Stop(Outcome.NO_SOLUTION, f"cannot symbolize situation: {exc}") from None
        self.symbol = sym.literal
        return self.symbol

    def _mutate(self, mutation: Mutation) -> None:
        self.domain, self.problem = self.surgery.apply(mutation, self.domain, self.problem)
        entry = self.surgery.entries[-1]
        self._event("surgery", change=mutation.describe(), diff=entry.diff)

    def _repair(self, current: Plan, start: int, verdict: FeasibilityVerdict) -> Plan:
        """Add the situation as knowledge and find a new plan, or stop."""
        blocked = verdict.action
        if blocked in self.blocked:
            raise _Stop(Outcome.NO_SOLUTION, f"{blocked.display()} judged infeasible again after repair")
        self.blocked.add(blocked)
        atom = self._symbolize()
        subject = atom.args[0]
        schema = self.domain.action(blocked.schema)
        if subject not in blocked.binding:
            raise _Stop(Outcome.NO_SOLUTION, f"{subject} is not an argument of {blocked.display()}")
        var = schema.params[blocked.binding.index(subject)][0]
        self._mutate(Mutation("precondition-added", blocked.schema, Literal(atom.predicate, (var,), False)))
        self._mutate(Mutation("init-fact-asserted", literal=atom))
        out = self._plan(self.domain, self.problem)
        self._event("replan", status=out.status.value)
        if out.found:
            return self._adopt(out.plan)
        return self._acquire(current, start, verdict.step, atom)

    def _acquire(self, current: Plan, start: int, blocked_step: int, atom: Literal) -> Plan:
        self.rounds += 1
        if self.rounds > self.cfg.acquisition_rounds:
            raise _Stop(Outcome.NO_SOLUTION, "acquisition round cap reached")
        role = choose_role(current, start, blocked_step, atom.args[0], self.domain)
        available = self.env.available_objects()
        facts = []
        if role is not None and available:
            facts = acquire_affordances(role.action, role.index, available, self.oracle, self.cfg.book, self.domain)
        if self.cfg.repair_actions:
            facts += acquire_state_changes(
                atom, self.cfg.repair_actions, self.oracle, self.cfg.book, self.domain, self.problem
            )
        for f in facts:
            self._event("affordance", object_class=f.object_class, action=f.action, role=f.role,
                        clears=None if f.clears is None else str(f.clears), exchange=f.provenance)
        candidates = [c for c in (self._candidate(f) for f in facts) if c is not None]
        if not candidates:
            raise _Stop(Outcome.NO_SOLUTION, "no plan and no usable alternative")
        chosen, ex_id = select_best(candidates, self.cfg.task_nl, self.situation, self.oracle)
        self._event("selected", label=chosen.label, options=[c.label for c in candidates], exchange=ex_id)
        for m in chosen.payload:
            self._mutate(m)
        return self._adopt(chosen.plan)

    def _candidate(self, fact: AffordanceFact) -> Candidate | None:
        """Try ``fact`` on copies of the pair; keep it only if a plan results."""
        mutations = [Mutation("action-extended", fact=fact)]
        schema = self.domain.action(fact.action)
        if fact.clears is None and schema is not None and fits_role(self.domain, fact.object_class, schema.params[fact.role][1]):
            mutations = []  # the object already fits; it only has to be made known
        if fact.clears is None:
            obj = next((n for n, t in self.env.available_objects() if t == fact.object_class), None)
            if obj is None:
                return None
            facts = self.env.spawn_facts(obj, fact.object_class)
            if not facts:
                return None
            mutations += [
                Mutation("init-fact-asserted", literal=f, object_types=((obj, fact.object_class),)) for f in facts
            ]
        d, p = self.domain, self.problem
        try:
            for m in mutations:
                d, p = m.apply(d, p, [])
        except UnknownType:
            log.info("skipping %s: not a type of this domain", fact.object_class)
            return None
        except SurgeryError as exc:
            log.info("skipping %s: %s", fact.object_class, exc)
            return None
        out = self._plan(d, p)
        if not out.found:
            return None
        return Candidate(fact.object_class, out.plan, mutations)

    def _resolution_point(self, current: Plan, start: int) -> int:
        """One past the first planned step that deletes the situation, else the plan's end."""
        if self.symbol is None:
            return len(current)
        gone = self.symbol.negate()
        for k in range(start, len(current)):
            if gone in current[k].effect:
                return k + 1
        return len(current)

    # -- main loop --------------------------------------------------------

    def run(self) -> tuple[Outcome, str]:
        out = self._plan(self.domain, self.problem)
        if not out.found:
            return Outcome.NO_SOLUTION, "no initial plan"
        current = self._adopt(out.plan)
        i = 0
        state = WorldState(self.problem.init)
        while True:
            if holds(state, self.problem.goal):
                return Outcome.COMPLETED, ""
            if i >= len(current):
                return Outcome.FAILED, "plan ran out before the goal held"
            if len(self.executed) >= self.cfg.max_steps:
                raise _Stop(Outcome.FAILED, "watchdog: step budget exceeded", "resource")
            fresh = self.env.observe(len(self.executed))
            if fresh and self.situation is None:
                self.situation = fresh
                self._event("situation", text=fresh)
                check = True
            else:
                check = False
            # after a replan the new plan is checked too, while the situation lasts
            while check and self.env.situation_active():
                end = self._resolution_point(current, i)
                verdict = monitor_plan(current, self.situation, self.oracle, self.cfg.book, i, end)
                self._event(
                    "verdict",
                    feasible=verdict.feasible,
                    step=verdict.step,
                    action=None if verdict.action is None else verdict.action.display(),
                    exchange=verdict.exchange_id,
                )
                if verdict.feasible:
                    break
                self.infeasible = True
                current = self._repair(current, i, verdict)
                i = 0
                state = WorldState(self.problem.init)
            if holds(state, self.problem.goal):
                return Outcome.COMPLETED, ""
            action = current[i]
            failure = self.env.execute(action)
            if failure:
                return Outcome.FAILED, f"execution: {failure}"
            state = apply(state, action)
            self.problem = self.problem.with_init(state.sorted())
            self.executed.append(action)
            i += 1


def run_episode(
    domain: DomainDescription,
    problem: ProblemDescription,
    env: Environment,
    oracle: Oracle,
    config: EngineConfig,
) -> EpisodeResult:
    ep = _Episode(domain, problem, env, oracle, config)
    cause = ""
    try:
        outcome, reason = ep.run()
    except _Stop as stop:
        outcome, reason, cause = stop.outcome, stop.reason, stop.cause
    except AuthError as exc:
        outcome, reason, cause = Outcome.FAILED, f"AuthError: {exc}", "auth"
    except OracleError as exc:
        outcome, reason, cause = Outcome.FAILED, f"{type(exc).__name__}: {exc}", "transport"
    except (MissingPattern, PDDLError) as exc:
        outcome, reason, cause = Outcome.FAILED, f"{type(exc).__name__}: {exc}", "fault"
    if outcome is Outcome.FAILED and not cause:
        cause = "execution"
    if outcome is Outcome.COMPLETED:
        # goal soundness: the executed steps must form a valid plan from the start
        check = validate_plan(ep.domain, problem.with_init(_initial_belief(problem, ep)), Plan(tuple(ep.executed)))
        if not check:
            outcome, reason, cause = Outcome.FAILED, f"executed steps do not validate: {check.message}", "fault"
    encountered = 1 if ep.situation else 0
    handled = int(encountered and ep.infeasible and outcome is Outcome.COMPLETED)
    return EpisodeResult(
        outcome=outcome,
        reason=reason,
        cause=cause,
        executed=tuple(a.display() for a in ep.executed),
        situation=ep.situation,
        symbol=str(ep.symbol) if ep.symbol is not None else None,
        encountered=encountered,
        infeasible=ep.infeasible,
        handled=handled,
        plans=tuple(tuple(p.names()) for p in ep.plans),
        surgeries=tuple(ep.surgery.to_json()),
        exchanges=tuple(oracle.log.items()),
        events=tuple(ep.events) + ({"event": "outcome", "executed": len(ep.executed), "outcome": outcome.value},),
        final_domain=serialize_domain(ep.domain),
    )


def _initial_belief(problem: ProblemDescription, ep: _Episode) -> list[Literal]:
    """Pristine init plus every fact the episode asserted along the way."""
    extra = [e.mutation.literal for e in ep.surgery.entries if e.mutation.kind == "init-fact-asserted"]
    return list(problem.init) + extra
