"""The three zero-shot prompt templates."""

from __future__ import annotations

import enum
import re


class PromptKind(str, enum.Enum):
    FEASIBILITY = "feasibility"
    AFFORDANCE = "affordance"
    SELECTION = "selection"
    SYMBOLIZE = "symbolize"


class TemplateError(ValueError):
    pass


class EmptyField(TemplateError):
    pass


class TooFewObjects(TemplateError):
    pass


FEASIBILITY = "Is it suitable for a robot to [Perform-Action], if [Situation]?"
AFFORDANCE = "Is it suitable for a robot to [Perform-Action-with-Object]?"
SELECTION = "There are some objects, such as [Objects]. Which is the most suitable for [Current-Task], if [Situation]?"

_PLACEHOLDER = re.compile(r"\[[A-Z][A-Za-z-]*\]")


def _fill(template: str, **fields: str) -> str:
    out = template
    for key, value in fields.items():
        value = value.strip()
        if not value:
            raise EmptyField(key)
        out = out.replace(f"[{key.replace('_', '-')}]", value)
    left = _PLACEHOLDER.findall(out)
    if left:
        raise TemplateError(f"unresolved placeholders: {', '.join(left)}")
    return out


def _clause(text: str) -> str:
    # the template supplies the terminal punctuation
    return text.strip().rstrip(".?!").strip()


def render_feasibility_prompt(action_nl: str, situation_nl: str) -> str:
    return _fill(FEASIBILITY, Perform_Action=_clause(action_nl), Situation=_clause(situation_nl))


def render_affordance_prompt(action_with_object_nl: str) -> str:
    return _fill(AFFORDANCE, Perform_Action_with_Object=_clause(action_with_object_nl))


def join_objects(objects: list[str]) -> str:
    """``X, Y, and Z``; with two objects ``X, and Y``."""
    if len(objects) < 2:
        raise TooFewObjects(f"need at least 2 objects, got {len(objects)}")
    return ", ".join(objects[:-1]) + ", and " + objects[-1]


def render_selection_prompt(objects: list[str], task_nl: str, situation_nl: str) -> str:
    names = [o.strip() for o in objects]
    if any(not o for o in names):
        raise EmptyField("Object")
    return _fill(
        SELECTION,
        Objects=join_objects(names),
        Current_Task=_clause(task_nl),
        Situation=_clause(situation_nl),
    )


# Inverse parsing, used by the offline knowledge base to read prompts back.

_FEAS_RE = re.compile(r"^Is it suitable for a robot to (?P<action>.+), if (?P<situation>.+)\?$", re.S)
_AFF_RE = re.compile(r"^Is it suitable for a robot to (?P<action>.+)\?$", re.S)
_SEL_RE = re.compile(
    r"^There are some objects, such as (?P<objects>.+)\. Which is the most suitable for (?P<task>.+), if (?P<situation>.+)\?$",
    re.S,
)


def split_objects(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    if parts and parts[-1].startswith("and "):
        parts[-1] = parts[-1][4:].strip()
    return [p for p in parts if p]


def parse_prompt(prompt: str, kind: PromptKind) -> dict:
    """Recover the filled fields of a rendered prompt (``{}`` if it does not match)."""
    if kind is PromptKind.FEASIBILITY:
        m = _FEAS_RE.match(prompt)
        return m.groupdict() if m else {}
    if kind is PromptKind.AFFORDANCE:
        m = _AFF_RE.match(prompt)
        return m.groupdict() if m else {}
    if kind is PromptKind.SELECTION:
        m = _SEL_RE.match(prompt)
        if not m:
            return {}
        return {"objects": split_objects(m["objects"]), "task": m["task"], "situation": m["situation"]}
    return {}
