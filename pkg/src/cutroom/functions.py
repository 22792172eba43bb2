"""The five LLM-powered editing functions.

Overview and brainstorming read the whole gallery and answer in chat;
retrieval reorders the gallery through the vector store; storyboarding
reorders the timeline (validated as a permutation before anything mutates);
trimming picks a clip window from frame captions. Each prompt starts with its
fixed preamble template, byte for byte.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import (
    CorpusTooLarge,
    CutroomError,
    EmptyGallery,
    EmptyTimelineInput,
    ExecutionFailed,
    MalformedStructuredOutput,
    PermutationViolation,
)
from .narration import VideoAsset, narration_line
from .providers import CompletionRequest, FunctionCall, Provider
from .templates import load_template
from .vectorstore import RankedResult, VectorStore

if TYPE_CHECKING:
    from .project import Project

BRAINSTORM_TEMPERATURE = 0.7
DEFAULT_GUIDANCE = "general"


# --- outcomes -----------------------------------------------------------------

@dataclass(frozen=True)
class GalleryReorder:
    ranking: RankedResult


@dataclass(frozen=True)
class TimelineReorder:
    ids: tuple[int, ...]


@dataclass(frozen=True)
class ClipTrim:
    asset_id: int
    start_s: int
    end_s: int
    rationale: str


UiEffect = GalleryReorder | TimelineReorder | ClipTrim | None


@dataclass(frozen=True)
class FunctionOutcome:
    chat_text: str
    ui_effect: UiEffect = None


@dataclass(frozen=True)
class StoryboardResult:
    storyboard_text: str
    video_ids: tuple[int, ...]


@dataclass(frozen=True)
class TrimResult:
    start_s: int
    end_s: int
    rationale: str
    matched: bool


# --- prompt assembly -----------------------------------------------------------

def _narration_block(assets: list[VideoAsset]) -> str:
    return "\n".join(narration_line(a) for a in assets)


def overview_prompt(assets: list[VideoAsset]) -> str:
    return load_template("overview_preamble.txt") + "\n\nVideos:\n" + _narration_block(assets)


def brainstorm_prompt(assets: list[VideoAsset], creative_guidance: str) -> str:
    return (
        load_template("brainstorm_preamble.txt")
        + f"\n\nCreative guidance: {creative_guidance}"
        + "\n\nVideos:\n"
        + _narration_block(assets)
    )


def storyboard_prompt(assets: list[VideoAsset], narrative_guidance: str | None) -> str:
    if narrative_guidance:
        guidance = f"Narrative guidance: {narrative_guidance}"
    else:
        guidance = (
            "No narrative guidance was provided. Invent a storyline that fits the "
            "timeline videos and order them accordingly."
        )
    return (
        load_template("storyboard_preamble.txt")
        + f"\n\n{guidance}"
        + "\n\nTimeline videos:\n"
        + _narration_block(assets)
    )


def trim_prompt(asset: VideoAsset, command: str) -> str:
    captions = "\n".join(f"{t}: {caption}" for t, caption in asset.frame_captions)
    return (
        load_template("trim_preamble.txt")
        + f"\n\nTrimming command: {command}"
        + "\n\nFrame captions:\n"
        + captions
    )


def _complete(
    provider: Provider,
    prompt: str,
    prompt_budget: int | None,
    temperature: float = 0.0,
    structured: bool = False,
) -> str:
    if prompt_budget is not None and provider.count_tokens(prompt) > prompt_budget:
        raise CorpusTooLarge(
            f"prompt is {provider.count_tokens(prompt)} tokens, budget is {prompt_budget}; "
            "refusing to truncate narrations"
        )
    return provider.complete(
        CompletionRequest(prompt=prompt, temperature=temperature, structured_mode=structured)
    )


# --- structured output extraction ------------------------------------------------

_FINAL_ANSWER = re.compile(r"Final Answer\s*:", re.IGNORECASE)


def extract_structured_object(text: str) -> dict | None:
    """The last well-formed top-level JSON object in ``text`` (models wrap
    output in prose), or None."""
    decoder = json.JSONDecoder()
    found: dict | None = None
    i = 0
    while i < len(text):
        if text[i] != "{":
            i += 1
            continue
        try:
            value, consumed = decoder.raw_decode(text[i:])
        except json.JSONDecodeError:
            i += 1
            continue
        if isinstance(value, dict):
            found = value
        i += max(consumed, 1)
    return found


def _extract_final_answer(text: str) -> dict | None:
    matches = list(_FINAL_ANSWER.finditer(text))
    if matches:
        tail = text[matches[-1].end():]
        parsed = extract_structured_object(tail)
        if parsed is not None:
            return parsed
    return extract_structured_object(text)


# --- functions ------------------------------------------------------------------

def overview(
    provider: Provider, gallery: list[VideoAsset], prompt_budget: int | None = None
) -> FunctionOutcome:
    if not gallery:
        raise EmptyGallery("the gallery has no videos to overview")
    text = _complete(provider, overview_prompt(gallery), prompt_budget)
    return FunctionOutcome(chat_text=text)


def brainstorm(
    provider: Provider,
    gallery: list[VideoAsset],
    creative_guidance: str = DEFAULT_GUIDANCE,
    prompt_budget: int | None = None,
) -> FunctionOutcome:
    if not gallery:
        raise EmptyGallery("the gallery has no videos to brainstorm over")
    prompt = brainstorm_prompt(gallery, creative_guidance or DEFAULT_GUIDANCE)
    text = _complete(provider, prompt, prompt_budget, temperature=BRAINSTORM_TEMPERATURE)
    return FunctionOutcome(chat_text=text)


def _parse_storyboard(completion: str) -> StoryboardResult:
    data = extract_structured_object(completion)
    if data is None:
        raise MalformedStructuredOutput("no JSON object found in storyboard output")
    storyboard_text = data.get("storyboard")
    raw_ids = data.get("video_ids")
    if not isinstance(storyboard_text, str) or not isinstance(raw_ids, list):
        raise MalformedStructuredOutput(
            'storyboard output must map "storyboard" to text and "video_ids" to a list'
        )
    ids = []
    for value in raw_ids:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise MalformedStructuredOutput(f"video id {value!r} is not an integer")
        try:
            ids.append(int(value))
        except ValueError as exc:
            raise MalformedStructuredOutput(f"video id {value!r} is not an integer") from exc
    return StoryboardResult(storyboard_text=storyboard_text, video_ids=tuple(ids))


def _permutation_violation(proposed: tuple[int, ...], expected: list[int]) -> str | None:
    missing = sorted(set(expected) - set(proposed))
    foreign = sorted(set(proposed) - set(expected))
    duplicated = sorted({i for i in proposed if list(proposed).count(i) > 1})
    problems = []
    if missing:
        problems.append(f"missing ids {missing}")
    if foreign:
        problems.append(f"unknown ids {foreign}")
    if duplicated:
        problems.append(f"duplicated ids {duplicated}")
    return "; ".join(problems) if problems else None


def storyboard(
    provider: Provider,
    timeline_assets: list[VideoAsset],
    narrative_guidance: str | None = None,
    prompt_budget: int | None = None,
) -> tuple[StoryboardResult, FunctionOutcome]:
    """Returns the validated result; the caller applies the timeline reorder.

    One repair re-ask on malformed output or a permutation violation, then the
    error propagates and the timeline must stay untouched.
    """
    if not timeline_assets:
        raise EmptyTimelineInput("the timeline has no clips to storyboard")
    expected = [a.id for a in timeline_assets]
    prompt = storyboard_prompt(timeline_assets, narrative_guidance)

    last_error: CutroomError | None = None
    ask = prompt
    for _ in range(2):
        completion = _complete(provider, ask, prompt_budget, structured=True)
        try:
            result = _parse_storyboard(completion)
        except MalformedStructuredOutput as exc:
            last_error = exc
            ask = (
                prompt
                + "\n\nYour previous reply could not be parsed: "
                + str(exc)
                + ' Reply with a JSON object holding the keys "storyboard" and "video_ids".'
            )
            continue
        violation = _permutation_violation(result.video_ids, expected)
        if violation is None:
            outcome = FunctionOutcome(
                chat_text=result.storyboard_text,
                ui_effect=TimelineReorder(ids=result.video_ids),
            )
            return result, outcome
        last_error = PermutationViolation(
            f"video_ids {list(result.video_ids)} is not a permutation of the timeline ids "
            f"{expected}: {violation}"
        )
        ask = (
            prompt
            + f"\n\nYour previous reply was invalid: {violation}. "
            + "Every input video id must appear exactly once in video_ids."
        )
    assert last_error is not None
    raise last_error


def _coerce_trim_bound(value) -> int:
    if isinstance(value, bool):
        raise MalformedStructuredOutput(f"trim bound {value!r} is not an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise MalformedStructuredOutput(f"trim bound {value!r} is not an integer")


def _parse_trim(completion: str, duration_s: int) -> TrimResult:
    data = _extract_final_answer(completion)
    if data is None or "segment" not in data:
        raise MalformedStructuredOutput('trim output has no "segment" object')
    segment = data["segment"]
    if not isinstance(segment, list):
        raise MalformedStructuredOutput('"segment" must be a list')
    if len(segment) == 0:
        return TrimResult(start_s=0, end_s=0, rationale=str(data.get("rationale", "")), matched=False)
    if len(segment) not in (2, 3):
        raise MalformedStructuredOutput(
            f'"segment" must be [start, end, rationale] or empty, got {len(segment)} items'
        )
    start = _coerce_trim_bound(segment[0])
    end = _coerce_trim_bound(segment[1])
    rationale = str(segment[2]) if len(segment) == 3 else ""
    start = min(max(start, 0), duration_s)
    end = min(max(end, 0), duration_s)
    if start > end:
        raise MalformedStructuredOutput(
            f"segment runs backwards after clamping: [{start}, {end}]"
        )
    return TrimResult(start_s=start, end_s=end, rationale=rationale, matched=True)


def trim_clip(
    provider: Provider,
    asset: VideoAsset,
    current_window: tuple[int, int],
    command: str,
    prompt_budget: int | None = None,
) -> TrimResult:
    """Reasoning runs over the whole clip's captions, not the current window,
    so re-trimming always starts from the full clip."""
    if not command:
        raise ValueError("trimming command must be non-empty")
    if not asset.frame_captions:
        raise ValueError("asset has no frame captions")
    prompt = trim_prompt(asset, command)

    ask = prompt
    last_error: MalformedStructuredOutput | None = None
    for _ in range(2):
        completion = _complete(provider, ask, prompt_budget, structured=True)
        try:
            return _parse_trim(completion, asset.duration_s)
        except MalformedStructuredOutput as exc:
            last_error = exc
            ask = (
                prompt
                + "\n\nYour previous reply could not be parsed: "
                + str(exc)
                + ' Reply in the exact format Final Answer: {"segment": [start, end, rationale]} '
                + "with integer start and end."
            )
    assert last_error is not None
    raise last_error


def retrieve_and_present(
    store: VectorStore, assets_by_id: dict[int, VideoAsset], query: str
) -> FunctionOutcome:
    ranking = store.retrieve(query)
    top = ranking.ids[:3]
    lines = [f"{rank}. {assets_by_id[i].narration.title}" for rank, i in enumerate(top, start=1)]
    chat = "Sorted the gallery by relevance. Top matches:\n" + "\n".join(lines)
    return FunctionOutcome(chat_text=chat, ui_effect=GalleryReorder(ranking=ranking))


# --- execution against a project ---------------------------------------------------

class ActionExecutor:
    """Binds the functions to one session's project and vector store, and
    applies each declared UI effect through the project's single-writer ops."""

    def __init__(
        self,
        provider: Provider,
        store: VectorStore,
        project: "Project",
        prompt_budget: int | None = None,
    ):
        self.provider = provider
        self.store = store
        self.project = project
        self.prompt_budget = prompt_budget

    def execute_call(self, call: FunctionCall) -> FunctionOutcome:
        try:
            if call.name == "Overview":
                return overview(self.provider, self.project.gallery_assets(), self.prompt_budget)
            if call.name == "Brainstorm":
                guidance = call.args.get("creative_guidance", DEFAULT_GUIDANCE)
                return brainstorm(
                    self.provider, self.project.gallery_assets(), guidance, self.prompt_budget
                )
            if call.name == "Retrieve":
                outcome = retrieve_and_present(
                    self.store, self.project.assets_by_id(), call.args.get("query", "")
                )
                assert isinstance(outcome.ui_effect, GalleryReorder)
                self.project.apply_gallery_ranking(outcome.ui_effect.ranking.ids)
                return outcome
            if call.name == "Storyboard":
                _, outcome = storyboard(
                    self.provider,
                    self.project.timeline_assets(),
                    call.args.get("narrative_guidance") or None,
                    self.prompt_budget,
                )
                assert isinstance(outcome.ui_effect, TimelineReorder)
                self.project.reorder(list(outcome.ui_effect.ids))
                return outcome
        except CutroomError:
            raise
        except Exception as exc:  # translate unexpected failures for the chat
            raise ExecutionFailed(f"{call.name} raised {type(exc).__name__}: {exc}") from exc
        raise ExecutionFailed(f"no executable function registered for {call.name!r}")

    def trim_command(self, asset_id: int, command: str) -> TrimResult:
        """The trim dialog path: run the trim function over the clip's full
        captions and apply the window when one matched."""
        asset = self.project.asset(asset_id)
        clip = self.project.timeline_clip(asset_id)
        result = trim_clip(
            self.provider, asset, (clip.start_s, clip.end_s), command, self.prompt_budget
        )
        if result.matched and result.start_s < result.end_s:
            self.project.set_trim(
                asset_id, result.start_s, result.end_s, rationale=result.rationale
            )
        return result
