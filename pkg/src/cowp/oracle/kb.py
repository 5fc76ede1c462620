"""Line-oriented knowledge base behind the offline oracle.

One rule per line, fields separated by ``|``::

    feasibility | fill, place | dirty, broken | no
    feasibility | *           | color        | yes | anywhere
    affordance  | fill        | bowl, glass  | yes
    preference  | serving water | glass, bowl, measuring cup

Feasibility rules match on the action's leading verb and a keyword in the
situation. Unless marked ``anywhere`` they also need the action to handle
the situation's subject (the head noun before the verb), so "the cup is
broken" does not block "turn on the faucet" and "the coffee maker is
broken" does not block "grasp coffee beans". The first matching rule
wins; with no match the answer is Yes.

Affordance rules match on the leading verb and a phrase in the
action-with-object text; the longest matching phrase wins and the default
is No. Preference lines rank objects for a task phrase.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .templates import PromptKind, parse_prompt
from .verdict import normalize

STOPWORDS = frozenset(
    "a an the to of in on at with from into onto for and or is are be been it its this that "
    "there some any robot room area".split()
)


def words(text: str) -> list[str]:
    return normalize(text).split()


@lru_cache(maxsize=8192)
def stem(word: str) -> str:
    if len(word) > 4 and word.endswith("es") and word[-3] in "sxz":
        return word[:-2]
    if len(word) > 3 and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


def content_words(text: str) -> set[str]:
    return {stem(w) for w in words(text) if w not in STOPWORDS}


_VERB = re.compile(
    r"\b(?:is|are|was|were|has|have|had|cannot|can't|can|does|do|did|won't|will|falls?|fell|"
    r"spills?|spilled|ran|runs?|leaks?|dropped|tastes?|looks?|got|gets?)\b"
)
_DETERMINERS = frozenset("the a an there some this that these those my no".split())


def subject_phrase(situation: str) -> str:
    """Words before the first verb, without determiners ("the coffee maker is broken" -> "coffee maker")."""
    norm = " ".join(words(situation))
    m = _VERB.search(norm)
    head = norm[: m.start()] if m else norm
    return " ".join(w for w in head.split() if w not in _DETERMINERS)


def handles_subject(action_nl: str, situation_nl: str) -> bool:
    subject = subject_phrase(situation_nl).split()
    return bool(subject) and stem(subject[-1]) in {stem(w) for w in words(action_nl)}


@lru_cache(maxsize=4096)
def _stemmed(text: str) -> str:
    return " " + " ".join(stem(w) for w in words(text)) + " "


def has_phrase(text: str, phrase: str) -> bool:
    p = _stemmed(phrase)
    return p.strip() != "" and p in _stemmed(text)


@dataclass(frozen=True)
class Rule:
    kind: str
    verbs: tuple[str, ...]
    phrases: tuple[str, ...]
    verdict: str = "yes"
    anywhere: bool = False
    source: str = ""

    def verb_ok(self, verb: str) -> bool:
        return "*" in self.verbs or verb in self.verbs


class KBFormatError(ValueError):
    pass


def _split_list(field: str) -> tuple[str, ...]:
    return tuple(x.strip().lower() for x in field.split(",") if x.strip())


class MockKnowledgeBase:
    def __init__(self, rules: list[Rule] = (), preferences: dict[str, tuple[str, ...]] | None = None):
        self.rules = list(rules)
        self.preferences = dict(preferences or {})

    @classmethod
    def parse(cls, text: str, source: str = "<kb>") -> "MockKnowledgeBase":
        rules, prefs = [], {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split("|")]
            kind = parts[0].lower()
            where = f"{source}:{lineno}"
            if kind == "preference":
                if len(parts) != 3:
                    raise KBFormatError(f"{where}: preference needs 3 fields")
                prefs.setdefault(normalize(parts[1]), _split_list(parts[2]))
                continue
            if kind not in ("feasibility", "affordance") or len(parts) not in (4, 5):
                raise KBFormatError(f"{where}: cannot read rule {raw!r}")
            verdict = parts[3].lower()
            if verdict not in ("yes", "no"):
                raise KBFormatError(f"{where}: verdict must be yes or no")
            anywhere = len(parts) == 5 and parts[4].lower() == "anywhere"
            if len(parts) == 5 and not anywhere:
                raise KBFormatError(f"{where}: unknown flag {parts[4]!r}")
            rules.append(Rule(kind, _split_list(parts[1]), _split_list(parts[2]), verdict, anywhere, where))
        return cls(rules, prefs)

    @classmethod
    def load(cls, *paths: str | Path) -> "MockKnowledgeBase":
        """Concatenate files in order; earlier files take precedence."""
        kb = cls()
        for path in paths:
            kb = kb + cls.parse(Path(path).read_text(encoding="utf-8"), str(path))
        return kb

    def __add__(self, other: "MockKnowledgeBase") -> "MockKnowledgeBase":
        prefs = dict(other.preferences)
        prefs.update(self.preferences)
        return MockKnowledgeBase(self.rules + other.rules, prefs)

    # -- lookups ------------------------------------------------------------

    def feasible(self, action_nl: str, situation_nl: str) -> tuple[bool, Rule | None]:
        toks = words(action_nl)
        verb = toks[0] if toks else ""
        shared = handles_subject(" ".join(toks[1:]), situation_nl)
        for rule in self.rules:
            if rule.kind != "feasibility" or not rule.verb_ok(verb):
                continue
            if not (rule.anywhere or shared):
                continue
            if any(has_phrase(situation_nl, k) for k in rule.phrases):
                return rule.verdict == "yes", rule
        return True, None

    def affords(self, action_with_object_nl: str) -> tuple[bool, Rule | None]:
        toks = words(action_with_object_nl)
        verb = toks[0] if toks else ""
        best = None
        for rule in self.rules:
            if rule.kind != "affordance" or not rule.verb_ok(verb):
                continue
            for phrase in rule.phrases:
                if has_phrase(action_with_object_nl, phrase):
                    size = len(words(phrase))
                    if best is None or size > best[0]:
                        best = (size, rule)
        if best is None:
            return False, None
        return best[1].verdict == "yes", best[1]

    def prefer(self, objects: list[str], task_nl: str) -> str | None:
        ranking = self.preferences.get(normalize(task_nl))
        if ranking is None:
            return None
        norm = {normalize(o): o for o in objects}
        for item in ranking:
            if normalize(item) in norm:
                return norm[normalize(item)]
        return None

    def answer(self, prompt: str, kind: PromptKind) -> str:
        """Completion text for a rendered prompt; deterministic in (prompt, rules)."""
        fields = parse_prompt(prompt, kind)
        if kind is PromptKind.FEASIBILITY:
            if not fields:
                return "I am not sure."
            ok, _ = self.feasible(fields["action"], fields["situation"])
            return "Yes." if ok else "No."
        if kind is PromptKind.AFFORDANCE:
            if not fields:
                return "I am not sure."
            ok, _ = self.affords(fields["action"])
            return "Yes." if ok else "No."
        if kind is PromptKind.SELECTION:
            pick = self.prefer(fields.get("objects", []), fields.get("task", "")) if fields else None
            return f"{pick[:1].upper()}{pick[1:]}." if pick else "None of them."
        raise ValueError(f"the knowledge base does not answer {kind.value} prompts")

