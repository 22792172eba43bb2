"""Deterministic scripted provider: the mock the whole test suite runs on.

A :class:`ProviderScript` is an ordered list of (matcher, canned response)
rules plus a fallback; the first matching rule wins and matching is pure, so
replaying the same request sequence against the same script reproduces
byte-identical responses.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ..errors import ProviderUnavailable, ResponseEmpty, UnreadableFrame
from .base import (
    CallLog,
    CompletionRequest,
    EmbeddingVector,
    FrameRef,
    FunctionCall,
    FunctionSchema,
    Provider,
    TokenCounter,
    heuristic_token_count,
)

Matcher = Callable[[str], bool]


@dataclass(frozen=True)
class ScriptRule:
    matcher: Matcher
    response: Any
    label: str = ""

    @staticmethod
    def substring(needle: str, response: Any) -> "ScriptRule":
        return ScriptRule(lambda text: needle in text, response, label=f"substring:{needle!r}")

    @staticmethod
    def regex(pattern: str, response: Any) -> "ScriptRule":
        compiled = re.compile(pattern)
        return ScriptRule(lambda text: compiled.search(text) is not None, response, label=f"regex:{pattern!r}")


@dataclass
class ProviderScript:
    """Ordered matcher list; first match wins, else the fallback."""

    rules: list[ScriptRule] = field(default_factory=list)
    fallback: Any = None

    def respond(self, text: str) -> Any:
        for rule in self.rules:
            if rule.matcher(text):
                return rule.response
        if self.fallback is None:
            raise ProviderUnavailable("no script rule matched and no fallback is configured")
        return self.fallback

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProviderScript":
        """Build a script from plain data, e.g. a replay-script YAML section.

        Each rule is ``{"match": <substring>, "response": ...}`` or
        ``{"pattern": <regex>, "response": ...}``.
        """
        rules = []
        for raw in data.get("rules", []):
            if "match" in raw:
                rules.append(ScriptRule.substring(raw["match"], raw["response"]))
            elif "pattern" in raw:
                rules.append(ScriptRule.regex(raw["pattern"], raw["response"]))
            else:
                raise ValueError(f"script rule needs 'match' or 'pattern': {raw!r}")
        return cls(rules=rules, fallback=data.get("fallback"))


def hash_to_vector(text: str, dim: int) -> tuple[float, ...]:
    """Deterministic unit vector: sha256(text) seeds the RNG that draws it."""
    seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(dim)
    norm = float(np.linalg.norm(vec))
    if norm > 0:
        vec = vec / norm
    return tuple(float(v) for v in vec)


class ScriptedProvider(Provider):
    """Provider backed entirely by scripts.

    - completions come from ``completion_script``
    - translations come from ``translate_script`` rules (canned JSON with
      ``name``/``arguments``) when one matches, else a deterministic rule:
      name passthrough, the action context into the function's single text
      argument (or that argument's default when the context is empty)
    - captions come from ``caption_script`` when one matches, else
      ``frame {index} caption``
    - embeddings are seeded hash-to-vector unless an ``embed_script`` rule
      matches (used to inject degenerate or wrong-dimension vectors)
    """

    def __init__(
        self,
        completion_script: ProviderScript | None = None,
        translate_script: ProviderScript | None = None,
        caption_script: ProviderScript | None = None,
        embed_script: ProviderScript | None = None,
        embedding_dim: int = 1536,
        embedding_model_id: str = "scripted-embedder",
        log: CallLog | None = None,
        token_counter: TokenCounter = heuristic_token_count,
    ):
        super().__init__(log=log, token_counter=token_counter)
        self.completion_script = completion_script or ProviderScript()
        self.translate_script = translate_script
        self.caption_script = caption_script
        self.embed_script = embed_script
        self.embedding_dim = embedding_dim
        self.embedding_model_id = embedding_model_id
        # matcher evaluation is serialized so scripted ordering is preserved
        # even under concurrent callers
        self._lock = threading.Lock()

    @classmethod
    def from_config(cls, data: dict[str, Any], log: CallLog | None = None) -> "ScriptedProvider":
        """Build from plain data (the ``provider`` section of a replay script)."""

        def section(key: str) -> ProviderScript | None:
            raw = data.get(key)
            return ProviderScript.from_dict(raw) if raw else None

        return cls(
            completion_script=section("completion"),
            translate_script=section("translate"),
            caption_script=section("caption"),
            embed_script=section("embed"),
            embedding_dim=int(data.get("embedding_dim", 1536)),
            log=log,
        )

    def complete(self, req: CompletionRequest) -> str:
        with self._lock:
            response = self.completion_script.respond(req.prompt)
        if not isinstance(response, str) or response == "":
            self.log.append("complete", req, response)
            raise ResponseEmpty("scripted completion is blank")
        self.log.append("complete", req, response)
        return response

    def translate_call(self, description: str, functions: list[FunctionSchema]) -> FunctionCall:
        call = None
        if self.translate_script is not None:
            with self._lock:
                try:
                    raw = self.translate_script.respond(description)
                except ProviderUnavailable:
                    raw = None
            if raw is not None:
                data = json.loads(raw) if isinstance(raw, str) else dict(raw)
                args = data.get("arguments", data.get("args", {})) or {}
                call = FunctionCall(name=data["name"], args=dict(args))
        if call is None:
            call = self._default_translation(description, functions)
        self.log.append("translate_call", description, call)
        return call

    @staticmethod
    def _default_translation(description: str, functions: list[FunctionSchema]) -> FunctionCall:
        name, _, context = description.partition(":")
        name = name.strip()
        context = context.strip()
        schema = next((f for f in functions if f.name == name), None)
        if schema is None or schema.text_param is None:
            return FunctionCall(name=name)
        if context:
            return FunctionCall(name=name, args={schema.text_param: context})
        default = schema.params[0].default
        if default is not None:
            return FunctionCall(name=name, args={schema.text_param: default})
        return FunctionCall(name=name)

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        values: tuple[float, ...] | None = None
        if self.embed_script is not None:
            with self._lock:
                try:
                    raw = self.embed_script.respond(text)
                except ProviderUnavailable:
                    raw = None
            if raw is not None:
                values = tuple(float(v) for v in raw)
        if values is None:
            values = hash_to_vector(text, self.embedding_dim)
        self._check_dim(values, self.embedding_dim)
        vector = EmbeddingVector(values=values, model_id=self.embedding_model_id)
        self.log.append("embed", text, vector)
        return vector

    def caption_frame(self, frame: FrameRef) -> str:
        if not frame.path.exists():
            raise UnreadableFrame(f"frame not readable: {frame.path}")
        caption = None
        if self.caption_script is not None:
            with self._lock:
                try:
                    caption = self.caption_script.respond(str(frame.path))
                except ProviderUnavailable:
                    caption = None
        if caption is None:
            caption = f"frame {frame.index} caption"
        self.log.append("caption_frame", frame, caption)
        return caption
