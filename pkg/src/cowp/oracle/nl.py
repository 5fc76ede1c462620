"""Symbolic action to English clause translation.

Patterns live in a text file, one per line::

    fill: fill a {2} with water
    move: carry a {2} from the {3} to the {4}
    fill/2: fill a {2} with water        # override used when asking about param 2

``{k}`` is the k-th bound argument (1-based), humanized: underscores become
spaces and a trailing instance number is dropped (``cup_2`` reads "cup").
"a" turns into "an" before a vowel. Cloned schemas use their base pattern.
"""

from __future__ import annotations

import re
from pathlib import Path

from ..pddl import GroundAction


class MissingPattern(KeyError):
    def __str__(self) -> str:
        return f"no sentence pattern for action {self.args[0]!r}"


_SLOT = re.compile(r"\{(\d+)\}")
_ARTICLE = re.compile(r"\b([Aa]) (?=[aeiouAEIOU])")
_INSTANCE = re.compile(r"_\d+$")


def humanize(name: str) -> str:
    return _INSTANCE.sub("", name).replace("_", " ")


def fix_articles(text: str) -> str:
    return _ARTICLE.sub(lambda m: m.group(1) + "n ", text)


class Phrasebook:
    def __init__(self, patterns: dict[str, str] | None = None):
        self.patterns = dict(patterns or {})

    @classmethod
    def parse(cls, text: str) -> "Phrasebook":
        patterns = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, template = line.partition(":")
            if not sep or not template.strip():
                raise ValueError(f"line {lineno}: expected 'action: template'")
            patterns[key.strip().lower()] = template.strip()
        return cls(patterns)

    @classmethod
    def load(cls, *paths: str | Path) -> "Phrasebook":
        """Later files override earlier ones."""
        book = cls()
        for path in paths:
            book.patterns.update(cls.parse(Path(path).read_text(encoding="utf-8")).patterns)
        return book

    def template(self, action: str, role: int | None = None) -> str:
        base = action.split("__", 1)[0]
        if role is not None and f"{base}/{role + 1}" in self.patterns:
            return self.patterns[f"{base}/{role + 1}"]
        try:
            return self.patterns[base]
        except KeyError:
            raise MissingPattern(base) from None

    def _render(self, template: str, args: tuple[str, ...]) -> str:
        def slot(m):
            k = int(m.group(1))
            if not 1 <= k <= len(args):
                raise ValueError(f"pattern {template!r} refers to argument {k} of {len(args)}")
            return humanize(args[k - 1])

        return fix_articles(_SLOT.sub(slot, template))

    def action_to_nl(self, a: GroundAction) -> str:
        return self._render(self.template(a.schema), a.binding)

    def action_with_object(self, a: GroundAction, role: int, object_class: str) -> str:
        """The clause for ``a`` with argument ``role`` replaced by ``object_class``."""
        template = self.template(a.schema, role)
        args = list(a.binding)
        args[role] = object_class
        if f"{{{role + 1}}}" in template:
            return self._render(template, tuple(args))
        return fix_articles(f"use a {humanize(object_class)} to ") + self._render(template, tuple(args))


def action_to_nl(a: GroundAction, book: Phrasebook) -> str:
    return book.action_to_nl(a)
