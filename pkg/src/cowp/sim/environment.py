"""Simulated household: true state, situation injection and execution judging."""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

from ..monitor import situation_clause
from ..oracle import Lexicon, MockKnowledgeBase, UnmappableSituation, situation_to_predicate
from ..oracle.nl import humanize
from ..pddl import GroundAction, Literal, PreconditionViolation, WorldState, apply, instantiate
from .catalog import CatalogEntry
from .dataset import Situation, SituationDataset
from .fixtures import TaskFixture

DEFAULT_P = 0.1


def maybe_inject(
    rng: np.random.Generator,
    task: str,
    step: int,
    dataset: SituationDataset,
    p: float = DEFAULT_P,
    choice_rng: np.random.Generator | None = None,
    active: bool = False,
) -> Situation | None:
    """Before executing ``step``: with probability ``p`` draw one distinguishable situation.

    One uniform draw from ``rng`` is consumed per call whatever the outcome,
    so draw ``k`` always belongs to step ``k``. The situation itself comes
    from ``choice_rng`` (``rng`` if not given). Returns ``None`` while
    another situation is active.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"injection probability must lie in [0, 1], got {p}")
    u = rng.random()
    if active or u >= p:
        return None
    pool = dataset.distinguishable(task)
    pick = (choice_rng or rng).integers(len(pool))
    return pool[int(pick)]


class RandomInjector:
    def __init__(self, dataset: SituationDataset, task: str, p: float, step_rng, choice_rng):
        self.dataset, self.task, self.p = dataset, task, p
        self.step_rng, self.choice_rng = step_rng, choice_rng

    def __call__(self, step: int, active: bool) -> str | None:
        s = maybe_inject(self.step_rng, self.task, step, self.dataset, self.p, self.choice_rng, active)
        return s.text if s else None


class ScriptedInjector:
    """Reports ``text`` right before step ``at_step`` (0-based)."""

    def __init__(self, text: str | None, at_step: int = 0):
        self.text, self.at_step = text, at_step

    def __call__(self, step: int, active: bool) -> str | None:
        return self.text if (self.text and step == self.at_step and not active) else None


def apply_aliases(text: str, aliases: dict[str, str]) -> str:
    """Rename dataset nouns to the fixture's objects ("Glass is broken" -> "Cup is broken")."""
    for src in sorted(aliases, key=len, reverse=True):
        dst = aliases[src]

        def swap(m, dst=dst):
            word = m.group(0)
            return dst[:1].upper() + dst[1:] if word[:1].isupper() else dst

        text = re.sub(rf"\b{re.escape(src)}\b", swap, text, flags=re.IGNORECASE)
    return text


class SimEnvironment:
    """Ground truth for one episode.

    The true state starts as the task's initial state plus the facts of
    every spawned object the task knows how to place. A reported situation
    is symbolized against the pristine domain and asserted into the true
    state; it stays active until an executed action deletes it. Executing
    an action fails if its preconditions do not hold in the true state, if
    the judge deems it unsuitable under the active situation, or if it uses
    an object in a way the judge does not accept.
    """

    def __init__(
        self,
        fixture: TaskFixture,
        spawned: list[CatalogEntry],
        judge: MockKnowledgeBase,
        lexicon: Lexicon | None,
        injector: Callable[[int, bool], str | None],
    ):
        self.fixture = fixture
        self.judge = judge
        self.lexicon = lexicon
        self.injector = injector
        known = set(fixture.problem.object_types) | {n for n, _ in fixture.domain.constants}
        self._available = [(e.type_name, e.type_name) for e in spawned if e.type_name not in known]
        self.types = dict(fixture.domain.constants) | fixture.problem.object_types | dict(self._available)
        atoms = set(fixture.problem.init)
        for name, t in self._available:
            atoms.update(fixture.spawn_facts(name, t))
        self.state = WorldState(frozenset(atoms))
        self.situation: str | None = None
        self.truth: Literal | None = None
        self.injected_at: int | None = None

    # -- Environment protocol ----------------------------------------------

    def observe(self, step: int) -> str | None:
        raw = self.injector(step, self.situation is not None)
        if not raw:
            return None
        self.situation = apply_aliases(raw, self.fixture.aliases)
        self.injected_at = step
        try:
            sym = situation_to_predicate(
                self.situation, self.fixture.domain, list(self.fixture.problem.objects), self.lexicon
            )
            self.truth = sym.literal
            self.state = self.state.with_atoms([self.truth])
        except UnmappableSituation:
            self.truth = None
        return self.situation

    def situation_active(self) -> bool:
        if self.situation is None:
            return False
        return self.truth is None or self.truth in self.state

    def available_objects(self) -> list[tuple[str, str]]:
        return list(self._available)

    def spawn_facts(self, name: str, type_name: str) -> list[Literal]:
        return self.fixture.spawn_facts(name, type_name)

    def execute(self, action: GroundAction) -> str | None:
        book = self.fixture.book
        nl = book.action_to_nl(action)
        if self.situation_active():
            ok, _ = self.judge.feasible(nl, situation_clause(self.situation))
            if not ok:
                return f"cannot {nl} when {situation_clause(self.situation)}"
        misuse = self._misuse(action)
        if misuse:
            return misuse
        try:
            after = apply(self.state, action)
        except PreconditionViolation as exc:
            return f"{action.display()}: {exc.literal} does not hold"
        if self.truth is not None and self.truth in self.state and self.truth not in after:
            if not self._clears_ok(action, nl):
                after = after.with_atoms([self.truth])
        self.state = after
        return None

    # -- judging -------------------------------------------------------------

    def _misuse(self, action: GroundAction) -> str | None:
        """Objects placed in slots the original schema does not type for them."""
        base = self.fixture.domain.action(action.base_name)
        if base is None or base.name == action.schema:
            return None
        d = self.fixture.domain
        for k, (_, t) in enumerate(base.params):
            obj_type = self.types.get(action.binding[k])
            if obj_type is None or (d.has_type(obj_type) and d.is_subtype(obj_type, t)):
                continue
            phrase = self.fixture.book.action_with_object(action, k, obj_type)
            ok, _ = self.judge.affords(phrase)
            if not ok:
                return f"unsuitable use of a {humanize(obj_type)}: {phrase}"
        return None

    def _clears_ok(self, action: GroundAction, nl: str) -> bool:
        """An action that was not built to remove the situation only does so if the judge agrees."""
        base = self.fixture.domain.action(action.base_name)
        if base is not None and len(base.params) == len(action.binding):
            pristine = instantiate(base, action.binding)
            if self.truth.negate() in pristine.effect:
                return True
        ok, _ = self.judge.affords(f"{nl} that {humanize(self.truth.predicate)}")
        return ok
