"""The editing session's document model: gallery, timeline with trims and
undo, preview rendering, and the persisted project document.

Timeline mutations snapshot the clip list before changing it; undo restores
the latest snapshot exactly. Gallery order changes only through retrieval
ranking; gallery membership changes only through ingestion.
"""

from __future__ import annotations

import copy
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    ClipNotOnTimeline,
    DuplicateOnTimeline,
    EmptyTimeline,
    InvalidRange,
    NotAPermutation,
    NothingToUndo,
    ProjectNotFound,
    SchemaVersionUnsupported,
    UnknownAsset,
)
from .media import MediaEngine, StubEngine
from .narration import NarrationCache, VideoAsset, VisualNarration
from .storage import ProjectPaths, canonical_json, read_json, write_json

SCHEMA_VERSION = 1
DEFAULT_UNDO_LIMIT = 100


@dataclass
class TimelineClip:
    asset_id: int
    position: int
    start_s: int
    end_s: int
    trim_rationale: str | None = None

    def to_dict(self) -> dict:
        return {
            "asset_id": self.asset_id,
            "position": self.position,
            "start_s": self.start_s,
            "end_s": self.end_s,
            "rationale": self.trim_rationale,
        }


@dataclass(frozen=True)
class PreviewArtifact:
    output_path: Path
    segments: tuple[tuple[int, int, int], ...]
    total_duration_s: int


@dataclass
class Gallery:
    assets: dict[int, VideoAsset] = field(default_factory=dict)
    display_order: list[int] = field(default_factory=list)
    selection: set[int] = field(default_factory=set)


class Project:
    def __init__(
        self,
        paths: ProjectPaths,
        engine: MediaEngine | None = None,
        undo_limit: int = DEFAULT_UNDO_LIMIT,
    ):
        self.paths = paths
        self.engine = engine if engine is not None else StubEngine(default_duration_s=10)
        self.undo_limit = undo_limit
        self.gallery = Gallery()
        self.clips: list[TimelineClip] = []
        self.undo_stack: list[list[TimelineClip]] = []
        self.chat_ref = "chat"

    # -- gallery access ------------------------------------------------------

    def asset(self, asset_id: int) -> VideoAsset:
        if asset_id not in self.gallery.assets:
            raise UnknownAsset(f"no asset with id {asset_id}")
        return self.gallery.assets[asset_id]

    def assets_by_id(self) -> dict[int, VideoAsset]:
        return dict(self.gallery.assets)

    def gallery_assets(self) -> list[VideoAsset]:
        return [self.gallery.assets[i] for i in self.gallery.display_order]

    def timeline_assets(self) -> list[VideoAsset]:
        return [self.gallery.assets[c.asset_id] for c in self.clips]

    def timeline_clip(self, asset_id: int) -> TimelineClip:
        for clip in self.clips:
            if clip.asset_id == asset_id:
                return clip
        raise ClipNotOnTimeline(f"asset {asset_id} is not on the timeline")

    def timeline_ids(self) -> list[int]:
        return [c.asset_id for c in self.clips]

    def timeline_state(self) -> list[dict]:
        return [c.to_dict() for c in self.clips]

    def add_asset(self, asset: VideoAsset) -> None:
        """Ingestion is the only path that grows the gallery."""
        self.gallery.assets[asset.id] = asset
        if asset.id not in self.gallery.display_order:
            self.gallery.display_order.append(asset.id)

    def apply_gallery_ranking(self, ranked_ids: list[int]) -> None:
        if sorted(ranked_ids) != sorted(self.gallery.assets):
            raise NotAPermutation("ranking does not cover the gallery exactly")
        self.gallery.display_order = list(ranked_ids)

    def set_selection(self, ids: list[int], selected: bool) -> None:
        for asset_id in ids:
            self.asset(asset_id)
        if selected:
            self.gallery.selection.update(ids)
        else:
            self.gallery.selection.difference_update(ids)

    # -- timeline mutations ------------------------------------------------------

    def _snapshot(self) -> None:
        self.undo_stack.append(copy.deepcopy(self.clips))
        if len(self.undo_stack) > self.undo_limit:
            self.undo_stack.pop(0)

    def _renumber(self) -> None:
        for i, clip in enumerate(self.clips):
            clip.position = i

    def add_to_timeline(self, ids: list[int]) -> list[TimelineClip]:
        on_timeline = set(self.timeline_ids())
        for asset_id in ids:
            self.asset(asset_id)
            if asset_id in on_timeline:
                raise DuplicateOnTimeline(f"asset {asset_id} is already on the timeline")
        self._snapshot()
        for asset_id in ids:
            asset = self.gallery.assets[asset_id]
            self.clips.append(
                TimelineClip(
                    asset_id=asset_id,
                    position=len(self.clips),
                    start_s=0,
                    end_s=asset.duration_s,
                )
            )
        return self.clips

    def reorder(self, permutation: list[int]) -> list[TimelineClip]:
        if sorted(permutation) != sorted(self.timeline_ids()):
            raise NotAPermutation(
                f"{permutation} is not a permutation of the timeline ids {self.timeline_ids()}"
            )
        self._snapshot()
        by_id = {c.asset_id: c for c in self.clips}
        self.clips = [by_id[i] for i in permutation]
        self._renumber()
        return self.clips

    def set_trim(
        self, asset_id: int, start_s: int, end_s: int, rationale: str | None = None
    ) -> TimelineClip:
        clip = self.timeline_clip(asset_id)
        duration = self.asset(asset_id).duration_s
        if not (0 <= start_s < end_s <= duration):
            raise InvalidRange(
                f"trim ({start_s}, {end_s}) violates 0 <= start < end <= {duration}"
            )
        self._snapshot()
        clip.start_s = start_s
        clip.end_s = end_s
        clip.trim_rationale = rationale
        return clip

    def remove(self, ids: list[int] | None = None) -> list[TimelineClip]:
        """Remove the given clips, or all of them when ids is None."""
        if ids is None:
            ids = self.timeline_ids()
        else:
            for asset_id in ids:
                self.timeline_clip(asset_id)
        self._snapshot()
        doomed = set(ids)
        self.clips = [c for c in self.clips if c.asset_id not in doomed]
        self._renumber()
        return self.clips

    def undo(self) -> list[TimelineClip]:
        if not self.undo_stack:
            raise NothingToUndo("the undo stack is empty")
        self.clips = self.undo_stack.pop()
        return self.clips

    # -- preview -------------------------------------------------------------------

    def render_preview(self) -> PreviewArtifact:
        if not self.clips:
            raise EmptyTimeline("nothing on the timeline to render")
        segments = tuple((c.asset_id, c.start_s, c.end_s) for c in self.clips)
        total = sum(end - start for _, start, end in segments)
        key = hashlib.sha256(canonical_json(list(segments)).encode("utf-8")).hexdigest()[:16]
        out_path = self.paths.previews / f"preview_{key}{self.engine.output_suffix}"
        manifest_path = self.paths.previews / f"preview_{key}.manifest.json"
        if not out_path.exists():
            parts = []
            for i, (asset_id, start, end) in enumerate(segments):
                part = self.paths.previews / f"part_{key}_{i}{self.engine.output_suffix}"
                self.engine.cut(self.asset(asset_id).media_path, start, end, part)
                parts.append(part)
            self.engine.concat(parts, out_path)
            for part in parts:
                part.unlink(missing_ok=True)
            write_json(
                manifest_path,
                {
                    "segments": [list(s) for s in segments],
                    "total_duration_s": total,
                    "output": out_path.name,
                },
            )
        return PreviewArtifact(output_path=out_path, segments=segments, total_duration_s=total)

    # -- persistence ------------------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "gallery": {
                "assets": [
                    {
                        "id": a.id,
                        "hash": a.media_hash,
                        "media_path": str(a.media_path),
                        "duration_s": a.duration_s,
                        "title": a.narration.title,
                        "summary": a.narration.summary,
                    }
                    for a in sorted(self.gallery.assets.values(), key=lambda a: a.id)
                ],
                "display_order": list(self.gallery.display_order),
                "selection": sorted(self.gallery.selection),
            },
            "timeline": {"clips": self.timeline_state()},
            "chat_transcript": self.chat_ref,
        }

    def save(self) -> Path:
        write_json(self.paths.document, self.to_document())
        return self.paths.document

    @classmethod
    def open(
        cls,
        root: Path,
        engine: MediaEngine | None = None,
        undo_limit: int = DEFAULT_UNDO_LIMIT,
    ) -> "Project":
        paths = ProjectPaths(root=Path(root))
        if not paths.document.exists():
            raise ProjectNotFound(f"no project document at {paths.document}")
        document = read_json(paths.document)
        version = document.get("schema_version")
        if not isinstance(version, int) or version > SCHEMA_VERSION:
            raise SchemaVersionUnsupported(f"cannot read schema version {version!r}")

        project = cls(paths, engine=engine, undo_limit=undo_limit)
        cache = NarrationCache(paths)
        for entry in document["gallery"]["assets"]:
            record = cache.load_asset(entry["id"])
            asset = VideoAsset(
                id=entry["id"],
                media_path=Path(entry["media_path"]),
                duration_s=entry["duration_s"],
                frame_captions=record.frame_captions,
                narration=VisualNarration(title=entry["title"], summary=entry["summary"]),
                media_hash=entry["hash"],
            )
            project.gallery.assets[asset.id] = asset
        project.gallery.display_order = list(document["gallery"]["display_order"])
        project.gallery.selection = set(document["gallery"].get("selection", []))
        for clip in document["timeline"]["clips"]:
            project.clips.append(
                TimelineClip(
                    asset_id=clip["asset_id"],
                    position=clip["position"],
                    start_s=clip["start_s"],
                    end_s=clip["end_s"],
                    trim_rationale=clip.get("rationale"),
                )
            )
        project.chat_ref = document.get("chat_transcript", "chat")
        return project

    @classmethod
    def from_cache(
        cls,
        root: Path,
        engine: MediaEngine | None = None,
        undo_limit: int = DEFAULT_UNDO_LIMIT,
    ) -> "Project":
        """Bootstrap a fresh document from an ingested narration cache."""
        paths = ProjectPaths(root=Path(root))
        project = cls(paths, engine=engine, undo_limit=undo_limit)
        for asset in NarrationCache(paths).all_assets():
            project.add_asset(asset)
        return project
