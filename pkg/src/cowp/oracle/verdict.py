"""Mapping raw completions to verdicts."""

from __future__ import annotations

import enum
import re
import string
from dataclasses import dataclass

from .templates import PromptKind


class VerdictKind(str, enum.Enum):
    YES = "yes"
    NO = "no"
    CHOICE = "choice"
    UNPARSEABLE = "unparseable"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    choice: str | None = None

    @property
    def is_yes(self) -> bool:
        return self.kind is VerdictKind.YES

    @property
    def is_no(self) -> bool:
        """Unparseable counts as No: a dubious action is not executed."""
        return self.kind in (VerdictKind.NO, VerdictKind.UNPARSEABLE)

    def __str__(self) -> str:
        return f"choice({self.choice})" if self.kind is VerdictKind.CHOICE else self.kind.value

    @classmethod
    def from_str(cls, text: str) -> "Verdict":
        if text.startswith("choice(") and text.endswith(")"):
            return cls(VerdictKind.CHOICE, text[7:-1])
        return cls(VerdictKind(text))


YES = Verdict(VerdictKind.YES)
NO = Verdict(VerdictKind.NO)
UNPARSEABLE = Verdict(VerdictKind.UNPARSEABLE)

_STRIP = re.compile(f"[{re.escape(string.punctuation)}]")


def normalize(text: str) -> str:
    return " ".join(_STRIP.sub(" ", text).lower().split())


def parse_yes_no(completion: str) -> Verdict:
    words = normalize(completion).split()
    if not words:
        return UNPARSEABLE
    if words[0] == "yes":
        return YES
    if words[0] == "no":
        return NO
    return UNPARSEABLE


def parse_choice(completion: str, options: list[str]) -> Verdict:
    """The option mentioned earliest in the completion wins.

    Ties on position (one option a prefix of another, e.g. ``glass`` and
    ``glass jar``) go to the longer option.
    """
    text = f" {normalize(completion)} "
    best = None
    for opt in options:
        key = normalize(opt)
        if not key:
            continue
        at = text.find(f" {key} ")
        if at < 0:
            continue
        rank = (at, -len(key))
        if best is None or rank < best[0]:
            best = (rank, opt)
    return Verdict(VerdictKind.CHOICE, best[1]) if best else UNPARSEABLE


def parse_verdict(completion: str, kind: PromptKind, options: list[str] | None = None) -> Verdict:
    if kind is PromptKind.SELECTION:
        return parse_choice(completion, options or [])
    if kind is PromptKind.SYMBOLIZE:
        return parse_symbol(completion)
    return parse_yes_no(completion)


_SYMBOL = re.compile(r"^\s*\(?\s*((?:is|has)_[a-z0-9_]+)\s+([a-z0-9_]+)\s*\)?")


def parse_symbol(completion: str) -> Verdict:
    """First line of a predicate-generator completion, e.g. ``(is_dirty cup)``."""
    lines = completion.strip().splitlines()
    m = _SYMBOL.match(lines[0].lower()) if lines else None
    if not m:
        return UNPARSEABLE
    return Verdict(VerdictKind.CHOICE, f"({m.group(1)} {m.group(2)})")
