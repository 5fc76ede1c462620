"""Plan monitoring: ask the oracle whether each remaining action still makes sense."""

from __future__ import annotations

from dataclasses import dataclass

from .oracle import Oracle, Phrasebook, PromptKind, render_feasibility_prompt
from .pddl import GroundAction
from .planner import Plan

_DETERMINERS = frozenset(
    "the a an this that these those there some no my your its his her their our it someone somebody all every".split()
)


def situation_clause(text: str) -> str:
    """Turn a reported situation into a subordinate clause.

    "Cup is broken." becomes "the cup is broken"; text that already opens
    with a determiner or "there" only loses its capital and final stop.
    """
    body = text.strip().rstrip(".!?").strip()
    if not body:
        return body
    first = body.split(None, 1)[0]
    if first.isupper() and len(first) > 1:  # acronym, keep as is
        lowered = body
    else:
        lowered = body[0].lower() + body[1:]
    if first.lower() in _DETERMINERS:
        return lowered
    return "the " + lowered


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    step: int | None = None
    action: GroundAction | None = None
    exchange_id: str | None = None
    queries: int = 0

    def __bool__(self) -> bool:
        return self.feasible

    def __str__(self) -> str:
        if self.feasible:
            return f"feasible ({self.queries} queries)"
        return f"infeasible at step {self.step + 1}: {self.action.display()} [{self.exchange_id}]"


def monitor_plan(
    plan: Plan,
    situation: str | None,
    oracle: Oracle,
    book: Phrasebook,
    start: int = 0,
    end: int | None = None,
) -> FeasibilityVerdict:
    """Ask the feasibility question for ``plan[start:end]`` in order; stop at the first No.

    ``start`` is an index into ``plan``; earlier steps have already run and
    are not re-checked. Steps from ``end`` on are not asked about (the
    situation is expected to be gone by then). An Unparseable answer
    counts as No.
    """
    end = len(plan) if end is None else end
    if not 0 <= start <= end <= len(plan):
        raise ValueError(f"steps {start}..{end} outside plan of length {len(plan)}")
    if not situation or not situation.strip():
        return FeasibilityVerdict(True)
    clause = situation_clause(situation)
    queries = 0
    for i in range(start, end):
        action = plan[i]
        prompt = render_feasibility_prompt(book.action_to_nl(action), clause)
        ex = oracle.query(prompt, PromptKind.FEASIBILITY)
        queries += 1
        if ex.verdict.is_no:
            return FeasibilityVerdict(False, i, action, ex.id, queries)
    return FeasibilityVerdict(True, queries=queries)
