"""Oracle exchanges and the append-only exchange log (JSON lines)."""

from __future__ import annotations

import json
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .templates import PromptKind
from .verdict import Verdict


@dataclass(frozen=True)
class OracleExchange:
    id: str
    kind: PromptKind
    prompt: str
    completion: str
    verdict: Verdict
    options: tuple[str, ...] = ()
    # not part of equality: replaying a log must compare equal to the original
    backend: str = field(default="", compare=False)
    latency: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        out["verdict"] = str(self.verdict)
        out["options"] = list(self.options)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "OracleExchange":
        return cls(
            id=data["id"],
            kind=PromptKind(data["kind"]),
            prompt=data["prompt"],
            completion=data["completion"],
            verdict=Verdict.from_str(data["verdict"]),
            options=tuple(data.get("options", ())),
            backend=data.get("backend", ""),
            latency=float(data.get("latency", 0.0)),
        )


class ExchangeLog:
    """Thread-safe append-only record; optionally mirrored to a JSONL file."""

    def __init__(self, path: str | Path | None = None, prefix: str = "x"):
        self._items: list[OracleExchange] = []
        self._lock = threading.Lock()
        self._path = Path(path) if path else None
        self.prefix = prefix

    def next_id(self) -> str:
        with self._lock:
            return f"{self.prefix}{len(self._items) + 1:04d}"

    def append(self, make) -> OracleExchange:
        """``make(id)`` builds the exchange; id assignment and append are atomic."""
        with self._lock:
            ex = make(f"{self.prefix}{len(self._items) + 1:04d}")
            self._items.append(ex)
            if self._path is not None:
                with self._path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(ex.to_json(), ensure_ascii=False) + "\n")
            return ex

    def __iter__(self) -> Iterator[OracleExchange]:
        with self._lock:
            return iter(list(self._items))

    def __len__(self) -> int:
        with self._lock:
            return len(self._items)

    def __getitem__(self, i) -> OracleExchange:
        with self._lock:
            return self._items[i]

    def items(self) -> list[OracleExchange]:
        with self._lock:
            return list(self._items)

    def dump(self, path: str | Path) -> None:
        write_jsonl(path, self.items())


def write_jsonl(path: str | Path, exchanges: Iterable[OracleExchange]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for ex in exchanges:
            fh.write(json.dumps(ex.to_json(), ensure_ascii=False) + "\n")


def read_jsonl(path: str | Path) -> list[OracleExchange]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(OracleExchange.from_json(json.loads(line)))
    return out
