"""Oracle configuration: endpoint, credential variable, model and sampling settings."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Any, Mapping


@dataclass(frozen=True)
class OracleConfig:
    endpoint: str = "https://api.openai.com/v1"
    model: str = "text-davinci-003"
    temperature: float = 0.0
    top_p: float = 1.0
    max_tokens: int = 32
    frequency_penalty: float = 0.0
    presence_penalty: float = 0.0
    credential_env: str = "OPENAI_API_KEY"
    timeout: float = 30.0
    retries: int = 3
    backoff: float = 0.5
    backoff_cap: float = 8.0
    max_in_flight: int = 4

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature out of range: {self.temperature}")
        if not 0.0 < self.top_p <= 1.0:
            raise ValueError(f"top_p out of range: {self.top_p}")
        for name in ("max_tokens", "retries", "max_in_flight"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def with_overrides(self, values: Mapping[str, Any]) -> "OracleConfig":
        """Apply string or typed overrides for known fields; unknown keys are ignored."""
        kinds = {f.name: f.type for f in fields(self)}
        cast = {"float": float, "int": int, "str": str}
        clean = {}
        for key, value in values.items():
            key = key.replace("-", "_")
            if key in kinds and value is not None:
                clean[key] = cast[kinds[key]](value)
        return replace(self, **clean)

    def request_body(self, prompt: str) -> dict:
        return {
            "model": self.model,
            "prompt": prompt,
            "temperature": self.temperature,
            "top_p": self.top_p,
            "max_tokens": self.max_tokens,
            "frequency_penalty": self.frequency_penalty,
            "presence_penalty": self.presence_penalty,
        }
