"""Evaluation environment: situation dataset, object catalog, injection, trials."""

from .catalog import CatalogEntry, ObjectCatalog, load_catalog, spawn_objects
from .dataset import TASKS, FormatError, MissingTask, Situation, SituationDataset, load_dataset, split_combined
from .environment import DEFAULT_P, RandomInjector, ScriptedInjector, SimEnvironment, apply_aliases, maybe_inject
from .fixtures import (
    TaskFixture,
    default_catalog,
    default_dataset,
    default_kb,
    default_lexicon,
    fewshot_preamble,
    judge_kb,
    load_all_tasks,
    load_task,
    load_task_dir,
)
from .trials import Metrics, TrialConfig, TrialRecord, engine_config_for, run_one, run_trials, situation_subject

__all__ = [
    "CatalogEntry",
    "DEFAULT_P",
    "FormatError",
    "Metrics",
    "MissingTask",
    "ObjectCatalog",
    "RandomInjector",
    "ScriptedInjector",
    "SimEnvironment",
    "Situation",
    "SituationDataset",
    "TASKS",
    "TaskFixture",
    "TrialConfig",
    "TrialRecord",
    "apply_aliases",
    "default_catalog",
    "default_dataset",
    "default_kb",
    "default_lexicon",
    "engine_config_for",
    "fewshot_preamble",
    "judge_kb",
    "load_all_tasks",
    "load_catalog",
    "load_dataset",
    "load_task",
    "load_task_dir",
    "maybe_inject",
    "run_one",
    "run_trials",
    "situation_subject",
    "spawn_objects",
    "split_combined",
]
