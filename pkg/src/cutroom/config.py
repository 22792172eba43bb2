"""Configuration: a YAML key-value file, documented in the README.

API keys never live in the file; the file names the environment variable that
holds the key (``api_key_env``). ``redact`` strips anything secret-shaped
before configuration is echoed over the API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

_SECRET_MARKERS = ("key", "token", "secret", "password")


@dataclass
class ProviderConfig:
    base_url: str = "http://127.0.0.1:9741/v1"
    api_key_env: str = "CUTROOM_API_KEY"
    completion_model: str = "editing-llm"
    function_call_model: str = "function-call-llm"
    caption_model: str = "frame-captioner"
    embedding_model: str = "narration-embedder"
    embedding_dim: int = 1536
    context_limit: int = 8192
    generation_reserve: float = 0.25
    timeout_s: float = 60.0
    retries: int = 1

    @property
    def max_output_tokens(self) -> int:
        """Tokens reserved for generation: 25% of the context limit by default."""
        return int(self.context_limit * self.generation_reserve)

    @property
    def prompt_budget(self) -> int:
        """Largest prompt the completion endpoint accepts."""
        return self.context_limit - self.max_output_tokens


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8710
    memory_budget: int = 6000
    undo_limit: int = 100
    call_log: str | None = None


@dataclass
class AppConfig:
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)

    @classmethod
    def load(cls, path: Path | str) -> "AppConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AppConfig":
        provider = ProviderConfig(**data.get("provider", {}))
        service = ServiceConfig(**data.get("service", {}))
        return cls(provider=provider, service=service)

    def to_dict(self) -> dict[str, Any]:
        return {
            "provider": dict(vars(self.provider)),
            "service": dict(vars(self.service)),
        }


def redact(data: Any) -> Any:
    """Recursively mask values under secret-shaped keys.

    ``api_key_env`` is exempt: it names an environment variable, which is not
    itself a credential.
    """
    if isinstance(data, dict):
        out = {}
        for key, value in data.items():
            lowered = key.lower()
            if lowered.endswith("_env"):
                out[key] = value
            elif any(marker in lowered for marker in _SECRET_MARKERS):
                out[key] = "***"
            else:
                out[key] = redact(value)
        return out
    if isinstance(data, list):
        return [redact(v) for v in data]
    return data
