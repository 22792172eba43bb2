"""Provider interface family.

Everything that talks to an external model service goes through a
:class:`Provider`: text completion (two logical endpoints, one for planning and
prompted functions, one for function-call translation), text embedding, and
frame captioning. Implementations: :class:`~cutroom.providers.scripted.ScriptedProvider`
(deterministic mock, used by the whole test suite) and
:class:`~cutroom.providers.http.HttpProvider` (OpenAI-compatible HTTP service).

Every call is appended to a :class:`CallLog`; the log length always equals the
number of calls made, and it can mirror to an append-only JSONL file.
"""

from __future__ import annotations

import json
import math
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..errors import DimensionMismatch

TokenCounter = Callable[[str], int]


def heuristic_token_count(text: str) -> int:
    """Default token estimate: ceil(utf8_bytes / 4).

    Not a real BPE tokenizer; the memory-eviction logic only needs a counter
    that is deterministic, zero on "", and monotone under concatenation.
    Byte length is additive, so all three hold.
    """
    if not text:
        return 0
    return math.ceil(len(text.encode("utf-8")) / 4)


@dataclass(frozen=True)
class CompletionRequest:
    """One completion call.

    ``structured_mode`` asks the provider for well-formed structured output
    (storyboarding, trimming); providers that cannot honor it just ignore it.
    """

    prompt: str
    max_output_tokens: int = 2048
    temperature: float = 0.0
    structured_mode: bool = False

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    model_id: str

    @property
    def dim(self) -> int:
        return len(self.values)

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding vector must be finite-valued")


@dataclass(frozen=True)
class FrameRef:
    """Reference to one sampled frame: its image file plus the second it was
    taken at (the index the captioning mock keys on)."""

    path: Path
    index: int


@dataclass(frozen=True)
class FunctionParam:
    name: str
    description: str
    required: bool = True
    default: str | None = None


@dataclass(frozen=True)
class FunctionSchema:
    """Declared schema of one registered editing function, as handed to the
    function-call translation endpoint."""

    name: str
    description: str
    params: tuple[FunctionParam, ...] = ()

    @property
    def text_param(self) -> str | None:
        """Name of the single free-text parameter, if the function has one."""
        return self.params[0].name if self.params else None


@dataclass(frozen=True)
class FunctionCall:
    name: str
    args: dict[str, str] = field(default_factory=dict)


@dataclass
class CallRecord:
    kind: str
    request: Any
    response: Any
    timestamp: float


class CallLog:
    """In-memory call log, optionally mirrored to an append-only JSONL file."""

    def __init__(self, path: Path | None = None):
        self._records: list[CallRecord] = []
        self._path = path
        self._lock = threading.Lock()

    def append(self, kind: str, request: Any, response: Any) -> None:
        record = CallRecord(kind=kind, request=request, response=response, timestamp=time.time())
        with self._lock:
            self._records.append(record)
            if self._path is not None:
                self._path.parent.mkdir(parents=True, exist_ok=True)
                line = json.dumps(
                    {
                        "kind": record.kind,
                        "request": _jsonable(record.request),
                        "response": _jsonable(record.response),
                        "timestamp": record.timestamp,
                    },
                    sort_keys=True,
                )
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> list[CallRecord]:
        return list(self._records)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, EmbeddingVector):
        return {"model_id": value.model_id, "dim": value.dim}
    if isinstance(value, CompletionRequest):
        return {
            "prompt": value.prompt,
            "max_output_tokens": value.max_output_tokens,
            "temperature": value.temperature,
            "structured_mode": value.structured_mode,
        }
    if isinstance(value, FrameRef):
        return {"path": str(value.path), "index": value.index}
    if isinstance(value, FunctionCall):
        return {"name": value.name, "args": dict(value.args)}
    return repr(value)


class Provider(ABC):
    """Interface all model services are used through.

    Clients are shareable across sessions and calls may run concurrently.
    """

    def __init__(self, log: CallLog | None = None, token_counter: TokenCounter = heuristic_token_count):
        self.log = log if log is not None else CallLog()
        self._count = token_counter

    @abstractmethod
    def complete(self, req: CompletionRequest) -> str:
        """Return the completion text for ``req``. Raises ProviderUnavailable /
        ResponseEmpty."""

    @abstractmethod
    def translate_call(self, description: str, functions: list[FunctionSchema]) -> FunctionCall:
        """Translate a natural-language action description into a function call
        using the function-calling endpoint."""

    @abstractmethod
    def embed(self, text: str) -> EmbeddingVector:
        """Embed ``text``; deterministic for identical input."""

    @abstractmethod
    def caption_frame(self, frame: FrameRef) -> str:
        """Return one caption sentence for the frame."""

    def caption_frames(self, frames: list[FrameRef]) -> list[str]:
        """Caption a batch, preserving input order."""
        return [self.caption_frame(f) for f in frames]

    def count_tokens(self, text: str) -> int:
        return self._count(text)

    def _check_dim(self, values: tuple[float, ...], expected: int) -> None:
        if len(values) != expected:
            raise DimensionMismatch(
                f"provider returned a {len(values)}-dim vector, expected {expected}"
            )
