"""Tokenizer and reader for Lisp-style PDDL source, tracking line/column."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import PDDLSyntaxError


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    column: int

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    line: int
    column: int

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom):
            return self.items[0].text
        return None


SExpr = Union[Atom, SList]


def tokenize(text: str) -> list[tuple[str, int, int]]:
    tokens: list[tuple[str, int, int]] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tokens.append((ch, line, col))
            i += 1
            col += 1
            continue
        start, start_col = i, col
        while i < n and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        tokens.append((text[start:i], line, start_col))
    return tokens


def read(text: str) -> SExpr:
    """Read exactly one top-level expression. Identifiers are lowercased."""
    tokens = tokenize(text)
    if not tokens:
        raise PDDLSyntaxError("empty input", 1, 1)
    pos = 0

    def parse() -> SExpr:
        nonlocal pos
        tok, line, col = tokens[pos]
        pos += 1
        if tok == ")":
            raise PDDLSyntaxError("unexpected ')'", line, col)
        if tok != "(":
            return Atom(tok.lower(), line, col)
        items = []
        while True:
            if pos >= len(tokens):
                raise PDDLSyntaxError("unbalanced '(' opened here", line, col)
            if tokens[pos][0] == ")":
                pos += 1
                return SList(tuple(items), line, col)
            items.append(parse())

    expr = parse()
    if pos != len(tokens):
        _, line, col = tokens[pos]
        raise PDDLSyntaxError("trailing content after top-level expression", line, col)
    return expr
