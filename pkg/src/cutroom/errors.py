"""Exception hierarchy. Every error carries a machine-readable code (the class
name) so the service layer can surface it to clients without string matching."""

from __future__ import annotations


class CutroomError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- providers ---------------------------------------------------------------

class ProviderUnavailable(CutroomError):
    """The backing model service could not be reached or refused the call."""


class ResponseEmpty(CutroomError):
    """The provider returned a blank completion."""


class DimensionMismatch(CutroomError):
    """An embedding came back with a dimension other than the configured one."""


class UnreadableFrame(CutroomError):
    """A frame reference could not be read for captioning."""


# --- narration ----------------------------------------------------------------

class UndecodableMedia(CutroomError):
    """The media file could not be decoded."""


class CaptioningFailed(CutroomError):
    """Frame captioning failed for one video (provider error propagated)."""


class MalformedNarration(CutroomError):
    """Title/summary generation output was missing a labeled field after retry."""


# --- vectorstore ---------------------------------------------------------------

class EmptyIndex(CutroomError):
    """Retrieval was attempted against an index with no entries."""


class EmptyQuery(CutroomError):
    """Retrieval was attempted with an empty query string."""


# --- agent ----------------------------------------------------------------------

class PreambleOverBudget(CutroomError):
    """The planning preamble alone exceeds the conversation token budget."""


class MissingGoal(CutroomError):
    """Plan completion did not contain a GOAL section."""


class MissingActions(CutroomError):
    """Plan completion did not contain an ACTIONS section with at least one step."""


class UnknownFunction(CutroomError):
    """A planned action named a function outside the registered action set."""

    def __init__(self, name: str):
        super().__init__(f"unknown function: {name!r}")
        self.name = name


class TranslationMismatch(CutroomError):
    """Function-call translation returned a name outside the registered set."""


class ExecutionFailed(CutroomError):
    """A planned action failed during execution; the plan pauses at that action."""


# --- editing functions ------------------------------------------------------------

class EmptyGallery(CutroomError):
    """A gallery-wide function was invoked with no videos in the gallery."""


class EmptyTimelineInput(CutroomError):
    """Storyboarding was invoked with no clips on the timeline."""


class PermutationViolation(CutroomError):
    """Storyboard video ids are not a permutation of the timeline's ids."""


class MalformedStructuredOutput(CutroomError):
    """No well-formed structured object could be extracted from the completion."""


class CorpusTooLarge(CutroomError):
    """Assembled prompt exceeds the completion context budget; refusing to truncate."""


# --- project -------------------------------------------------------------------------

class UnknownAsset(CutroomError):
    """An asset id does not exist in the gallery."""


class DuplicateOnTimeline(CutroomError):
    """The asset is already placed on the timeline."""


class NotAPermutation(CutroomError):
    """A reorder request is not a permutation of the current timeline ids."""


class InvalidRange(CutroomError):
    """A trim window violates 0 <= start < end <= duration."""


class ClipNotOnTimeline(CutroomError):
    """The referenced clip is not on the timeline."""


class NothingToUndo(CutroomError):
    """Undo was requested with an empty undo stack."""


class EmptyTimeline(CutroomError):
    """Preview rendering was requested for an empty timeline."""


class MediaEngineFailure(CutroomError):
    """The media engine failed; stderr (if any) is preserved on the exception."""

    def __init__(self, message: str, stderr: str = ""):
        super().__init__(message)
        self.stderr = stderr


# --- service ----------------------------------------------------------------------------

class ProjectNotFound(CutroomError):
    """The project path does not exist or holds no project document."""


class SchemaVersionUnsupported(CutroomError):
    """The project document schema version is newer than this build understands."""


class SessionNotFound(CutroomError):
    """No open session with the given id."""
