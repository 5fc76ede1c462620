"""Bundled task fixtures and data files."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

from ..oracle import Lexicon, MockKnowledgeBase, Phrasebook
from ..pddl import DomainDescription, Literal, ProblemDescription, parse_domain, parse_problem
from ..pddl.sexpr import SList, read
from .catalog import ObjectCatalog, load_catalog
from .dataset import TASKS, SituationDataset, canonical_task, load_dataset, task_slug


def data_dir() -> Path:
    return Path(str(resources.files("cowp") / "data"))


def data_path(*parts: str) -> Path:
    return data_dir().joinpath(*parts)


def parse_literals(text: str) -> list[Literal]:
    """``(p a b) (q c)`` -> literals; ``{obj}``-style placeholders must be filled first."""
    expr = read(f"({text})")
    out = []
    for item in expr:
        if not isinstance(item, SList) or not item.items or item.head() is None:
            raise ValueError(f"expected literals, got {text!r}")
        out.append(Literal(item.head(), tuple(x.text for x in item.items[1:])))
    return out


@dataclass(frozen=True)
class TaskFixture:
    name: str
    phrase: str  # e.g. "serving water", used in selection prompts
    domain: DomainDescription
    problem: ProblemDescription
    book: Phrasebook
    aliases: dict[str, str] = field(default_factory=dict)
    spawn: dict[str, str] = field(default_factory=dict)
    repair_actions: tuple[str, ...] = ()
    directory: Path | None = None

    @property
    def slug(self) -> str:
        return task_slug(self.name)

    def spawn_facts(self, obj: str, type_name: str) -> list[Literal]:
        """Facts that hold for a spawned object, from the nearest typed template."""
        if not self.domain.has_type(type_name):
            return []
        for t in self.domain.ancestors(type_name):
            if t in self.spawn:
                return parse_literals(self.spawn[t].replace("{obj}", obj))
        return []


def load_task_dir(directory: str | Path, base_patterns: Path | None = None) -> TaskFixture:
    directory = Path(directory)
    ini = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    ini.optionxform = str  # keep case of keys such as type names
    ini.read(directory / "task.ini", encoding="utf-8")
    domain = parse_domain((directory / "domain.pddl").read_text(encoding="utf-8"))
    problem = parse_problem((directory / "problem.pddl").read_text(encoding="utf-8"), domain)
    pattern_files = [p for p in (base_patterns, directory / "patterns.txt") if p is not None and p.exists()]
    task = ini["task"] if ini.has_section("task") else {}
    repair = tuple(x.strip() for x in task.get("repair_actions", "").split(",") if x.strip())
    return TaskFixture(
        name=task.get("name", directory.name),
        phrase=task.get("phrase", directory.name.replace("_", " ")),
        domain=domain,
        problem=problem,
        book=Phrasebook.load(*pattern_files),
        aliases={k.lower(): v.strip().lower() for k, v in ini["aliases"].items()} if ini.has_section("aliases") else {},
        spawn={k.lower(): v.strip() for k, v in ini["spawn"].items()} if ini.has_section("spawn") else {},
        repair_actions=repair,
        directory=directory,
    )


@lru_cache(maxsize=None)
def load_task(name: str) -> TaskFixture:
    task = canonical_task(name)
    return load_task_dir(data_path("tasks", task_slug(task)), data_path("patterns.txt"))


def load_all_tasks() -> list[TaskFixture]:
    return [load_task(t) for t in TASKS]


@lru_cache(maxsize=None)
def default_kb() -> MockKnowledgeBase:
    return MockKnowledgeBase.load(data_path("mock.kb"))


@lru_cache(maxsize=None)
def judge_kb() -> MockKnowledgeBase:
    """Ground truth for execution: the extra rules first, then the oracle's own."""
    return MockKnowledgeBase.load(data_path("judge_extra.kb"), data_path("mock.kb"))


@lru_cache(maxsize=None)
def default_lexicon() -> Lexicon:
    return Lexicon.load(data_path("lexicon.txt"))


@lru_cache(maxsize=None)
def fewshot_preamble() -> str:
    return data_path("fewshot.txt").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def default_catalog() -> ObjectCatalog:
    return load_catalog(data_path("catalog.csv"))


@lru_cache(maxsize=None)
def default_dataset() -> SituationDataset:
    return load_dataset(data_path("situations"))
