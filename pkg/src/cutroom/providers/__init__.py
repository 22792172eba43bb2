from .base import (
    CallLog,
    CompletionRequest,
    EmbeddingVector,
    FrameRef,
    FunctionCall,
    FunctionParam,
    FunctionSchema,
    Provider,
    TokenCounter,
    heuristic_token_count,
)
from .scripted import ProviderScript, ScriptRule, ScriptedProvider, hash_to_vector

__all__ = [
    "CallLog",
    "CompletionRequest",
    "EmbeddingVector",
    "FrameRef",
    "FunctionCall",
    "FunctionParam",
    "FunctionSchema",
    "Provider",
    "ProviderScript",
    "ScriptRule",
    "ScriptedProvider",
    "TokenCounter",
    "hash_to_vector",
    "heuristic_token_count",
]
