"""Situation dataset: one five-column CSV per task.

Columns (headered): ``situation`` (A, the crowd-written text), ``step`` (B,
the plan step it refers to), ``group`` (C, 1-based index of the
distinguishable situation), ``description`` (D, the group's canonical
text) and ``count`` (E, number of distinguishable situations for the task).
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

TASKS = (
    "Set table",
    "Serve water",
    "Serve coke",
    "Wash plate",
    "Heat burger",
    "Make coffee",
    "Clean floor",
    "Prepare burger",
    "Store food",
    "Wash cup",
    "Wash sink",
    "Wash glass",
)

COLUMNS = ("situation", "step", "group", "description", "count")
MIN_GROUPS, MAX_GROUPS = 12, 24


class FormatError(ValueError):
    pass


class MissingTask(KeyError):
    pass


def task_slug(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", name.strip().lower()).strip("_")


def canonical_task(name: str) -> str:
    slug = task_slug(name)
    for t in TASKS:
        if task_slug(t) == slug:
            return t
    raise MissingTask(name)


@dataclass(frozen=True)
class Situation:
    text: str
    task: str
    step: str
    group: int
    description: str = ""
    symbol: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("situation text is empty")
        if self.group < 1:
            raise ValueError("group index must be at least 1")


@dataclass
class SituationDataset:
    rows: dict[str, list[Situation]] = field(default_factory=dict)

    @property
    def tasks(self) -> list[str]:
        return list(self.rows)

    def counts(self) -> dict[str, int]:
        return {t: len({s.group for s in rows}) for t, rows in self.rows.items()}

    def distinguishable(self, task: str) -> list[Situation]:
        """One representative per group, in group order; text is the group description."""
        if task not in self.rows:
            raise MissingTask(task)
        reps: dict[int, Situation] = {}
        for s in self.rows[task]:
            reps.setdefault(s.group, s)
        return [
            Situation(r.description or r.text, task, r.step, r.group, r.description) for _, r in sorted(reps.items())
        ]


def _read_task_file(path: Path, task: str) -> list[Situation]:
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip().lower() for h in header) != COLUMNS:
            raise FormatError(f"{path}: header must be {','.join(COLUMNS)}")
        declared = None
        for rowno, row in enumerate(reader, 2):
            if not any(cell.strip() for cell in row):
                continue
            if len(row) != 5:
                raise FormatError(f"{path}: row {rowno}: expected 5 columns, got {len(row)}")
            text, step, group, desc, count = (c.strip() for c in row)
            try:
                g, n = int(group), int(count)
            except ValueError:
                raise FormatError(f"{path}: row {rowno}: group and count must be integers") from None
            if g < 1:
                raise FormatError(f"{path}: row {rowno}: group index must be at least 1")
            if not text:
                raise FormatError(f"{path}: row {rowno}: empty situation text")
            if declared is None:
                declared = n
            elif n != declared:
                raise FormatError(f"{path}: row {rowno}: count {n} disagrees with earlier {declared}")
            rows.append(Situation(text, task, step, g, desc))
    if not rows:
        raise FormatError(f"{path}: no situations")
    groups = sorted({s.group for s in rows})
    if groups != list(range(1, len(groups) + 1)):
        raise FormatError(f"{path}: group indices must run 1..N without gaps")
    if len(groups) != declared:
        raise FormatError(f"{path}: column E says {declared} groups, found {len(groups)}")
    for g in groups:
        descs = {s.description for s in rows if s.group == g}
        if len(descs) != 1:
            raise FormatError(f"{path}: group {g} has differing descriptions")
    return rows


def load_dataset(path: str | Path, tasks=TASKS) -> SituationDataset:
    """Load a directory of per-task files (``serve_water.csv`` ...) or a single task file."""
    path = Path(path)
    ds = SituationDataset()
    if path.is_file():
        task = canonical_task(path.stem)
        ds.rows[task] = _read_task_file(path, task)
        return ds
    if not path.is_dir():
        raise FileNotFoundError(path)
    for task in tasks:
        f = path / f"{task_slug(task)}.csv"
        if not f.exists():
            raise MissingTask(task)
        ds.rows[task] = _read_task_file(f, task)
    for task, n in ds.counts().items():
        if not MIN_GROUPS <= n <= MAX_GROUPS:
            raise FormatError(f"{task}: {n} distinguishable situations, expected {MIN_GROUPS}..{MAX_GROUPS}")
    return ds


def split_combined(src: str | Path, out_dir: str | Path) -> list[Path]:
    """Convert one concatenated CSV with a leading ``task`` column into per-task files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_task: dict[str, list[list[str]]] = {}
    with Path(src).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip().lower() for h in header) != ("task", *COLUMNS):
            raise FormatError(f"{src}: header must be task,{','.join(COLUMNS)}")
        for rowno, row in enumerate(reader, 2):
            if not any(c.strip() for c in row):
                continue
            if len(row) != 6:
                raise FormatError(f"{src}: row {rowno}: expected 6 columns")
            by_task.setdefault(canonical_task(row[0]), []).append(row[1:])
    written = []
    for task, rows in by_task.items():
        dest = out_dir / f"{task_slug(task)}.csv"
        with dest.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(COLUMNS)
            w.writerows(rows)
        written.append(dest)
    return written
