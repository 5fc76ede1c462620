"""Seeded trial runs and completion / situation-handling metrics."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..engine import EngineConfig, EpisodeResult, Outcome, run_episode
from ..oracle import Backend, Lexicon, MockKnowledgeBase, Oracle
from ..oracle.kb import subject_phrase, words
from ..pddl import holds
from .catalog import ObjectCatalog, spawn_objects
from .dataset import SituationDataset
from .environment import DEFAULT_P, RandomInjector, SimEnvironment
from .fixtures import TaskFixture


@dataclass(frozen=True)
class TrialConfig:
    task: str
    seed: int = 0
    p: float = DEFAULT_P
    oracle: str = "mock"
    trials: int = 150
    jobs: int = 1

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"P must lie in [0, 1], got {self.p}")
        if self.trials < 1 or self.jobs < 1:
            raise ValueError("trials and jobs must be positive")


@dataclass(frozen=True)
class TrialRecord:
    index: int
    task: str
    outcome: str
    reason: str
    situation: str | None
    subject: str | None
    encountered: int
    handled: int
    steps: int
    queries: int
    cause: str = ""

    @property
    def completed(self) -> bool:
        return self.outcome == Outcome.COMPLETED.value


def situation_subject(text: str) -> str:
    """The noun phrase a situation is about ("Kitchen door is locked" -> "kitchen door")."""
    return subject_phrase(text) or " ".join(words(text)[:1])


@dataclass
class Metrics:
    trials: int = 0
    completed: int = 0
    no_solution: int = 0
    failed: int = 0
    encountered: int = 0
    handled: int = 0
    per_task: dict[str, "Metrics"] = field(default_factory=dict)
    per_object: dict[str, list[int]] = field(default_factory=dict)  # subject -> [encountered, handled]

    @property
    def completion_pct(self) -> float:
        return 100.0 * self.completed / self.trials if self.trials else 0.0

    @property
    def handling_pct(self) -> float | None:
        return 100.0 * self.handled / self.encountered if self.encountered else None

    def add(self, r: TrialRecord) -> None:
        self.trials += 1
        self.completed += r.completed
        self.no_solution += r.outcome == Outcome.NO_SOLUTION.value
        self.failed += r.outcome == Outcome.FAILED.value
        self.encountered += r.encountered
        self.handled += r.handled
        if r.encountered and r.subject:
            slot = self.per_object.setdefault(r.subject, [0, 0])
            slot[0] += 1
            slot[1] += r.handled

    @classmethod
    def aggregate(cls, records: list[TrialRecord]) -> "Metrics":
        total = cls()
        for r in records:
            total.add(r)
            total.per_task.setdefault(r.task, cls()).add(r)
        return total

    def to_json(self, breakdown: bool = True) -> dict:
        out = {
            "trials": self.trials,
            "completed": self.completed,
            "no_solution": self.no_solution,
            "failed": self.failed,
            "encountered": self.encountered,
            "handled": self.handled,
            "completion_pct": round(self.completion_pct, 4),
            "handling_pct": None if self.handling_pct is None else round(self.handling_pct, 4),
        }
        if breakdown:
            out["per_task"] = {t: m.to_json(False) for t, m in sorted(self.per_task.items())}
            out["per_object"] = {k: {"encountered": v[0], "handled": v[1]} for k, v in sorted(self.per_object.items())}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Metrics":
        m = cls(*(int(data[k]) for k in ("trials", "completed", "no_solution", "failed", "encountered", "handled")))
        m.per_task = {t: cls.from_json(v) for t, v in data.get("per_task", {}).items()}
        m.per_object = {k: [int(v["encountered"]), int(v["handled"])] for k, v in data.get("per_object", {}).items()}
        return m

    def table(self, label: str = "COWP") -> str:
        """Aligned text table: one row per task, then the overall row."""

        rows = [(t, m) for t, m in sorted(self.per_task.items())] + [("Overall", self)]
        width = max(len(r[0]) for r in rows)
        lines = [
            f"{'Task':<{width}}  {'Trials':>6}  {'Task completion (%)':>19}  {'Situation handling (%)':>22}  [{label}]"
        ]
        for name, m in rows:
            lines.append(f"{name:<{width}}  {m.trials:>6}  {_pct(m.completion_pct):>19}  {_pct(m.handling_pct):>22}")
        return "\n".join(lines)


def _pct(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.1f}"


def comparison_table(named: dict[str, Metrics]) -> str:
    """Rows per task plus Overall; a completion and a handling column per labelled run."""
    tasks = sorted({t for m in named.values() for t in m.per_task})
    rows = [(t, [m.per_task.get(t) for m in named.values()]) for t in tasks]
    rows.append(("Overall", list(named.values())))
    width = max(len("Task"), *(len(r[0]) for r in rows))
    head = f"{'Task':<{width}}"
    for label in named:
        head += f"  {label + ' completion (%)':>22}  {label + ' handling (%)':>20}"
    lines = [head]
    for name, ms in rows:
        line = f"{name:<{width}}"
        for m in ms:
            comp = None if m is None else m.completion_pct
            hand = None if m is None else m.handling_pct
            line += f"  {_pct(comp):>22}  {_pct(hand):>20}"
        lines.append(line)
    return "\n".join(lines)


def trial_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(n)


def run_one(
    index: int,
    seq: np.random.SeedSequence,
    config: TrialConfig,
    fixture: TaskFixture,
    dataset: SituationDataset,
    catalog: ObjectCatalog,
    backend: Backend,
    judge: MockKnowledgeBase,
    engine: EngineConfig,
) -> tuple[TrialRecord, EpisodeResult]:
    spawn_seq, step_seq, choice_seq = seq.spawn(3)
    spawned = spawn_objects(catalog, spawn_seq)
    injector = RandomInjector(
        dataset, fixture.name, config.p, np.random.default_rng(step_seq), np.random.default_rng(choice_seq)
    )
    env = SimEnvironment(fixture, spawned, judge, engine.lexicon, injector)
    oracle = Oracle(backend)
    result = run_episode(fixture.domain, fixture.problem, env, oracle, engine)
    outcome, reason, handled, cause = result.outcome.value, result.reason, result.handled, result.cause
    if result.completed and not holds(env.state, fixture.problem.goal):
        outcome, reason, handled, cause = Outcome.FAILED.value, "goal does not hold in the world", 0, "execution"
    subject = situation_subject(env.situation) if env.situation else None
    record = TrialRecord(
        index,
        fixture.name,
        outcome,
        reason,
        result.situation,
        subject,
        result.encountered,
        handled,
        len(result.executed),
        len(result.exchanges),
        cause,
    )
    return record, result


def run_trials(
    config: TrialConfig,
    fixture: TaskFixture,
    dataset: SituationDataset,
    catalog: ObjectCatalog,
    backend: Backend,
    judge: MockKnowledgeBase,
    engine: EngineConfig,
) -> tuple[Metrics, list[TrialRecord]]:
    seeds = trial_seeds(config.seed, config.trials)
    args = (config, fixture, dataset, catalog, backend, judge, engine)
    if config.jobs == 1:
        pairs = [run_one(i, s, *args) for i, s in enumerate(seeds)]
    else:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            pairs = list(pool.map(lambda ix: run_one(ix[0], ix[1], *args), enumerate(seeds)))
    records = [r for r, _ in pairs]
    return Metrics.aggregate(records), records


def engine_config_for(fixture: TaskFixture, lexicon: Lexicon | None, **overrides) -> EngineConfig:
    return EngineConfig(
        task_nl=fixture.phrase,
        book=fixture.book,
        lexicon=lexicon,
        repair_actions=fixture.repair_actions,
        **overrides,
    )
