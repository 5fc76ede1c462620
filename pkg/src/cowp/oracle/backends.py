"""Completion backends and the logging ``Oracle`` front end."""

from __future__ import annotations

import logging
import os
import threading
import time
from collections import defaultdict, deque
from typing import Iterable, Protocol

import httpx

from .config import OracleConfig
from .exchange import ExchangeLog, OracleExchange
from .kb import MockKnowledgeBase
from .templates import PromptKind, parse_prompt
from .verdict import parse_verdict

log = logging.getLogger(__name__)


class OracleError(Exception):
    pass


class TransportError(OracleError):
    pass


class AuthError(OracleError):
    pass


class ReplayMiss(OracleError):
    pass


class Backend(Protocol):
    name: str

    def complete(self, prompt: str, kind: PromptKind) -> str: ...


class MockBackend:
    name = "mock"

    def __init__(self, kb: MockKnowledgeBase):
        self.kb = kb

    def complete(self, prompt: str, kind: PromptKind) -> str:
        return self.kb.answer(prompt, kind)


class AlwaysYesBackend:
    """Answers every question in the affirmative: the closed-world baseline."""

    name = "always-yes"

    def complete(self, prompt: str, kind: PromptKind) -> str:
        if kind is PromptKind.SELECTION:
            objects = parse_prompt(prompt, kind).get("objects") or ["yes"]
            return objects[0] + "."
        return "Yes."


class ReplayBackend:
    """Serves completions from a previous run's exchanges, in order per prompt."""

    name = "replay"

    def __init__(self, exchanges: Iterable[OracleExchange]):
        self._queues: dict[tuple[str, str], deque[str]] = defaultdict(deque)
        self._lock = threading.Lock()
        for ex in exchanges:
            self._queues[(ex.kind.value, ex.prompt)].append(ex.completion)

    def complete(self, prompt: str, kind: PromptKind) -> str:
        with self._lock:
            queue = self._queues.get((kind.value, prompt))
            if not queue:
                raise ReplayMiss(f"no logged completion for {kind.value} prompt {prompt!r}")
            return queue.popleft()


class RemoteBackend:
    """OpenAI-compatible ``/completions`` client.

    Transport failures, timeouts, 429 and 5xx responses are retried with
    capped exponential backoff; 401/403 raise ``AuthError`` at once.
    """

    name = "remote"

    def __init__(self, config: OracleConfig, client: httpx.Client | None = None, sleep=time.sleep):
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout)
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self._sleep = sleep

    def _headers(self) -> dict[str, str]:
        key = os.environ.get(self.config.credential_env)
        if not key:
            raise AuthError(f"credential variable {self.config.credential_env} is not set")
        return {"Authorization": f"Bearer {key}", "Content-Type": "application/json"}

    def complete(self, prompt: str, kind: PromptKind) -> str:
        url = self.config.endpoint.rstrip("/") + "/completions"
        headers = self._headers()
        body = self.config.request_body(prompt)
        last: Exception | None = None
        for attempt in range(self.config.retries):
            if attempt:
                self._sleep(min(self.config.backoff_cap, self.config.backoff * 2 ** (attempt - 1)))
            try:
                with self._slots:
                    resp = self._client.post(url, json=body, headers=headers)
            except httpx.HTTPError as exc:
                last = exc
                log.warning("completion request failed (attempt %d): %s", attempt + 1, exc)
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"endpoint refused credentials ({resp.status_code})")
            if resp.status_code == 429 or resp.status_code >= 500:
                last = TransportError(f"HTTP {resp.status_code}")
                log.warning("completion request got HTTP %d (attempt %d)", resp.status_code, attempt + 1)
                continue
            if resp.status_code >= 400:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["text"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed completion response: {exc}") from exc
        raise TransportError(f"giving up after {self.config.retries} attempts: {last}")

    def close(self) -> None:
        self._client.close()


class Oracle:
    """A backend plus the exchange log every query is appended to."""

    def __init__(self, backend: Backend, log: ExchangeLog | None = None):
        self.backend = backend
        self.log = log if log is not None else ExchangeLog()

    @property
    def name(self) -> str:
        return self.backend.name

    def query(self, prompt: str, kind: PromptKind, options: Iterable[str] = ()) -> OracleExchange:
        options = tuple(options)
        start = time.perf_counter()
        completion = self.backend.complete(prompt, kind)
        latency = time.perf_counter() - start
        verdict = parse_verdict(completion, kind, list(options))
        return self.log.append(
            lambda xid: OracleExchange(xid, kind, prompt, completion, verdict, options, self.backend.name, latency)
        )

    def fork(self) -> "Oracle":
        """Same backend, fresh log (one per episode)."""
        return Oracle(self.backend, ExchangeLog())


def query(backend: Backend, prompt: str, kind: PromptKind, log: ExchangeLog | None = None, options=()) -> OracleExchange:
    return Oracle(backend, log).query(prompt, kind, options)
