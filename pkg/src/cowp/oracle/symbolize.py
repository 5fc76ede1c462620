"""Natural-language situation to ground literal ("Cup is dirty" -> ``(is_dirty cup)``)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from ..pddl import ROOT_TYPE, DomainDescription, Literal
from .kb import stem, words
from .nl import humanize
from .templates import PromptKind


class UnmappableSituation(ValueError):
    pass


@dataclass(frozen=True)
class Symbolized:
    literal: Literal
    fresh: bool
    subject: str


class Lexicon:
    """Ordered ``phrase => predicate`` table; the longest matching phrase wins."""

    def __init__(self, entries: list[tuple[str, str]] | None = None):
        self.entries = list(entries or [])

    @classmethod
    def parse(cls, text: str) -> "Lexicon":
        entries = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            phrase, sep, pred = line.partition("=>")
            if not sep or not pred.strip():
                raise ValueError(f"line {lineno}: expected 'phrase => predicate'")
            entries.append((" ".join(words(phrase)), pred.strip().lower()))
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path) -> "Lexicon":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    def lookup(self, text: str) -> str | None:
        padded = f" {' '.join(words(text))} "
        best = None
        for phrase, pred in self.entries:
            if f" {phrase} " in padded and (best is None or len(phrase) > len(best[0])):
                best = (phrase, pred)
        return best[1] if best else None


_IS = re.compile(r"\b(?:is|are|was|were|gets?|got|became|becomes)\s+(?:very\s+|too\s+|a\s+bit\s+)?([a-z]+)")
_HAS = re.compile(r"\b(?:has|have|had)\s+(?:an?\s+|the\s+)?([a-z]+(?:\s+[a-z]+)?)")


def fallback_predicate(text: str) -> str | None:
    norm = " ".join(words(text))
    m = _IS.search(norm)
    if m and m.group(1) not in ("not", "no", "the", "a", "an"):
        return f"is_{m.group(1)}"
    m = _HAS.search(norm)
    if m:
        return "has_" + m.group(1).replace(" ", "_")
    return None


def _name_index(domain: DomainDescription, objects: Iterable[tuple[str, str]]) -> list[tuple[tuple[str, ...], str, str]]:
    """(stemmed words, name, 'object'|'type') for every mentionable name."""
    out = []
    for name, _ in [*domain.constants, *objects]:
        out.append((tuple(stem(w) for w in humanize(name).split()), name, "object"))
    for name, _ in domain.types:
        if name != ROOT_TYPE:
            out.append((tuple(stem(w) for w in humanize(name).split()), name, "type"))
    return out


def find_subject(text: str, domain: DomainDescription, objects: Iterable[tuple[str, str]]) -> str:
    """The earliest (then longest) mention of a known object or type.

    A type mention resolves to the first object of that type, in name order.
    """
    objects = list(objects)
    toks = [stem(w) for w in words(text)]
    typed = sorted([*domain.constants, *objects])
    hits = []
    for key, name, what in _name_index(domain, objects):
        n = len(key)
        for i in range(len(toks) - n + 1):
            if tuple(toks[i : i + n]) == key:
                hits.append((i, -n, what != "object", name, what))
                break
    for _, _, _, name, what in sorted(hits):
        if what == "object":
            return name
        members = [o for o, t in typed if domain.is_subtype(t, name)]
        if members:
            return members[0]
    raise UnmappableSituation(f"no known object in {text!r}")


def situation_to_predicate(
    situation: str,
    domain: DomainDescription,
    objects: Iterable[tuple[str, str]] = (),
    lexicon: Lexicon | None = None,
) -> Symbolized:
    if not situation.strip():
        raise UnmappableSituation("empty situation")
    subject = find_subject(situation, domain, objects)
    pred = (lexicon.lookup(situation) if lexicon else None) or fallback_predicate(situation)
    if pred is None:
        raise UnmappableSituation(f"no predicate for {situation!r}")
    return Symbolized(Literal(pred, (subject,)), domain.predicate(pred) is None, subject)


# -- remote path ------------------------------------------------------------


def render_symbolize_prompt(preamble: str, situation: str, objects: Iterable[str]) -> str:
    listing = ", ".join(objects)
    return f"{preamble.rstrip()}\n\nObjects: {listing}\nSituation: {situation.strip()}\nPredicate:"


def symbolize_with_oracle(
    oracle,
    preamble: str,
    situation: str,
    domain: DomainDescription,
    objects: Iterable[tuple[str, str]] = (),
) -> Symbolized:
    """Few-shot predicate generation through a completion backend."""
    objects = list(objects)
    names = [n for n, _ in [*domain.constants, *objects]]
    ex = oracle.query(render_symbolize_prompt(preamble, situation, names), PromptKind.SYMBOLIZE)
    if ex.verdict.choice is None:
        raise UnmappableSituation(f"predicate generator gave {ex.completion!r}")
    pred, subject = ex.verdict.choice.strip("()").split()
    if subject not in names:
        raise UnmappableSituation(f"predicate generator named unknown object {subject!r}")
    return Symbolized(Literal(pred, (subject,)), domain.predicate(pred) is None, subject)
