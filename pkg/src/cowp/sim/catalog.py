"""The simulator's object catalog and per-trial spawning."""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

CATEGORIES = ("kitchenware", "appliance", "furniture", "food", "drink")
CATALOG_SIZE = 86
EXPECTED_COUNTS = {"kitchenware": 29, "drink": 8}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    category: str

    @property
    def type_name(self) -> str:
        """Planning type (and object constant) used when the object is spawned."""
        return self.name.strip().lower().replace(" ", "_").replace("-", "_")


class ObjectCatalog:
    def __init__(self, entries: list[CatalogEntry]):
        self.entries = tuple(entries)
        self._validate()

    def _validate(self) -> None:
        if len(self.entries) != CATALOG_SIZE:
            raise ValueError(f"catalog must hold {CATALOG_SIZE} objects, has {len(self.entries)}")
        names = [e.type_name for e in self.entries]
        dupes = [n for n, c in Counter(names).items() if c > 1]
        if dupes:
            raise ValueError(f"duplicate catalog names: {', '.join(dupes)}")
        for e in self.entries:
            if e.category not in CATEGORIES:
                raise ValueError(f"{e.name}: unknown category {e.category!r}")
        counts = self.counts()
        for cat, n in EXPECTED_COUNTS.items():
            if counts.get(cat, 0) != n:
                raise ValueError(f"catalog has {counts.get(cat, 0)} {cat} objects, expected {n}")

    def counts(self) -> dict[str, int]:
        return dict(Counter(e.category for e in self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def category_of(self, type_name: str) -> str | None:
        for e in self.entries:
            if e.type_name == type_name:
                return e.category
        return None


def load_catalog(path: str | Path) -> ObjectCatalog:
    entries = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["name", "class"]:
            raise ValueError(f"{path}: header must be name,class")
        for row in reader:
            if not row or not any(c.strip() for c in row):
                continue
            entries.append(CatalogEntry(row[0].strip(), row[1].strip().lower()))
    return ObjectCatalog(entries)


def spawn_objects(catalog: ObjectCatalog, seed) -> list[CatalogEntry]:
    """Half of the catalog, sampled uniformly without replacement; catalog order kept."""
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(catalog), size=len(catalog) // 2, replace=False)
    return [catalog.entries[i] for i in sorted(picked)]
