"""The registered agent action set.

Exactly four actions are agent-invokable: Overview, Brainstorm, Retrieve, and
Storyboard. Clip trimming is LLM-powered too but lives behind the timeline's
trim dialog, not the agent, so it is deliberately absent here.
"""

from __future__ import annotations

from ..errors import UnknownFunction
from ..providers import FunctionParam, FunctionSchema
from ..templates import load_synonyms

OVERVIEW = "Overview"
BRAINSTORM = "Brainstorm"
RETRIEVE = "Retrieve"
STORYBOARD = "Storyboard"

REGISTRY: dict[str, FunctionSchema] = {
    OVERVIEW: FunctionSchema(
        name=OVERVIEW,
        description="Summarize the common topics or themes across all gallery videos.",
    ),
    BRAINSTORM: FunctionSchema(
        name=BRAINSTORM,
        description="Brainstorm video editing ideas grounded in the gallery videos.",
        params=(
            FunctionParam(
                name="creative_guidance",
                description="Optional creative guidance steering the ideation.",
                required=False,
                default="general",
            ),
        ),
    ),
    RETRIEVE: FunctionSchema(
        name=RETRIEVE,
        description="Rank gallery videos by relevance to a language query.",
        params=(
            FunctionParam(
                name="query",
                description="Language query describing the footage to find.",
            ),
        ),
    ),
    STORYBOARD: FunctionSchema(
        name=STORYBOARD,
        description="Reorder the timeline clips to match a narrative.",
        params=(
            FunctionParam(
                name="narrative_guidance",
                description="Optional storyline the ordering should follow.",
                required=False,
            ),
        ),
    ),
}

_CANONICAL_LOWER = {name.lower(): name for name in REGISTRY}


def resolve_function_name(raw: str, synonyms: dict[str, str] | None = None) -> str:
    """Map a freely phrased action name onto the registry, case-insensitively
    and through the synonym table. Raises UnknownFunction otherwise."""
    if synonyms is None:
        synonyms = load_synonyms()
    cleaned = raw.strip().strip(".").strip().lower()
    if cleaned in _CANONICAL_LOWER:
        return _CANONICAL_LOWER[cleaned]
    if cleaned in synonyms:
        resolved = synonyms[cleaned]
        if resolved in REGISTRY:
            return resolved
    raise UnknownFunction(raw.strip())
