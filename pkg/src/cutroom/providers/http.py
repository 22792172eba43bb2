"""HTTP provider for OpenAI-compatible model services.

Two completion model ids share one base URL: ``completion_model`` serves
planning and the prompted editing functions, ``function_call_model`` serves
function-call translation. Every call gets a per-call timeout and one retry.
"""

from __future__ import annotations

import base64
import json
import os

import httpx

from ..config import ProviderConfig
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


class HttpProvider(Provider):
    def __init__(
        self,
        config: ProviderConfig,
        log: CallLog | None = None,
        token_counter: TokenCounter = heuristic_token_count,
        client: httpx.Client | None = None,
    ):
        super().__init__(log=log, token_counter=token_counter)
        self.config = config
        self._client = client or httpx.Client(timeout=config.timeout_s)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.config.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, path: str, payload: dict) -> dict:
        url = self.config.base_url.rstrip("/") + path
        last_error: Exception | None = None
        for _ in range(1 + self.config.retries):
            try:
                response = self._client.post(url, json=payload, headers=self._headers())
                if response.status_code >= 400:
                    raise ProviderUnavailable(
                        f"provider returned HTTP {response.status_code}: {response.text[:200]}"
                    )
                return response.json()
            except ProviderUnavailable as exc:
                last_error = exc
            except (httpx.HTTPError, json.JSONDecodeError, OSError) as exc:
                last_error = exc
        raise ProviderUnavailable(f"provider unreachable at {url}: {last_error}")

    def complete(self, req: CompletionRequest) -> str:
        payload = {
            "model": self.config.completion_model,
            "messages": [{"role": "user", "content": req.prompt}],
            "max_tokens": req.max_output_tokens,
            "temperature": req.temperature,
        }
        if req.structured_mode:
            payload["response_format"] = {"type": "json_object"}
        data = self._post("/chat/completions", payload)
        text = _message_content(data)
        if not text.strip():
            self.log.append("complete", req, text)
            raise ResponseEmpty("provider returned a blank completion")
        self.log.append("complete", req, text)
        return text

    def translate_call(self, description: str, functions: list[FunctionSchema]) -> FunctionCall:
        payload = {
            "model": self.config.function_call_model,
            "messages": [{"role": "user", "content": description}],
            "temperature": 0.0,
            "tools": [_tool_schema(f) for f in functions],
            "tool_choice": "required",
        }
        data = self._post("/chat/completions", payload)
        try:
            tool_call = data["choices"][0]["message"]["tool_calls"][0]["function"]
            args = json.loads(tool_call.get("arguments") or "{}")
            call = FunctionCall(name=tool_call["name"], args={k: str(v) for k, v in args.items()})
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise ProviderUnavailable(f"malformed function-call response: {exc}") from exc
        self.log.append("translate_call", description, call)
        return call

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        data = self._post("/embeddings", {"model": self.config.embedding_model, "input": text})
        try:
            values = tuple(float(v) for v in data["data"][0]["embedding"])
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderUnavailable(f"malformed embedding response: {exc}") from exc
        self._check_dim(values, self.config.embedding_dim)
        vector = EmbeddingVector(values=values, model_id=self.config.embedding_model)
        self.log.append("embed", text, vector)
        return vector

    def caption_frame(self, frame: FrameRef) -> str:
        try:
            image_b64 = base64.b64encode(frame.path.read_bytes()).decode("ascii")
        except OSError as exc:
            raise UnreadableFrame(f"frame not readable: {frame.path}") from exc
        payload = {
            "model": self.config.caption_model,
            "messages": [
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": "Describe this video frame in one sentence."},
                        {
                            "type": "image_url",
                            "image_url": {"url": f"data:image/jpeg;base64,{image_b64}"},
                        },
                    ],
                }
            ],
            "temperature": 0.0,
        }
        data = self._post("/chat/completions", payload)
        caption = _message_content(data)
        if not caption.strip():
            raise ResponseEmpty("provider returned a blank caption")
        self.log.append("caption_frame", frame, caption)
        return caption


def _message_content(data: dict) -> str:
    try:
        return data["choices"][0]["message"]["content"] or ""
    except (KeyError, IndexError, TypeError) as exc:
        raise ProviderUnavailable(f"malformed completion response: {exc}") from exc


def _tool_schema(schema: FunctionSchema) -> dict:
    properties = {
        p.name: {"type": "string", "description": p.description} for p in schema.params
    }
    required = [p.name for p in schema.params if p.required]
    return {
        "type": "function",
        "function": {
            "name": schema.name,
            "description": schema.description,
            "parameters": {"type": "object", "properties": properties, "required": required},
        },
    }
