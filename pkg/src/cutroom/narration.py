"""Footage preprocessing: per-second frame sampling, frame captioning, and
generated titles/summaries, persisted to a per-project narration cache.

The cache is keyed by media content hash, so re-ingesting an unchanged file is
a pure cache hit and performs zero provider calls.
"""

from __future__ import annotations

import hashlib
import logging
import shutil
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CaptioningFailed, CutroomError, MalformedNarration, UndecodableMedia
from .media import MediaEngine
from .providers import CompletionRequest, EmbeddingVector, FrameRef, Provider
from .storage import ProjectPaths, read_json, write_json
from .templates import load_template

log = logging.getLogger(__name__)

MEDIA_SUFFIXES = {".mp4", ".avi", ".mov", ".mkv", ".webm", ".m4v"}
TITLE_MAX_CHARS = 80


@dataclass(frozen=True)
class VisualNarration:
    title: str
    summary: str


@dataclass
class VideoAsset:
    id: int
    media_path: Path
    duration_s: int
    frame_captions: list[tuple[int, str]]
    narration: VisualNarration
    media_hash: str
    embedding: EmbeddingVector | None = None

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError("asset id must be nonnegative")
        if self.duration_s < 1:
            raise ValueError("duration must be at least one second")
        timestamps = [t for t, _ in self.frame_captions]
        if timestamps != list(range(self.duration_s)):
            raise ValueError(
                f"expected captions at 0..{self.duration_s - 1}, got timestamps {timestamps}"
            )


def media_content_hash(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class NarrationCache:
    """Per-project cache: manifest (id allocation, hash index) + asset records.

    Concurrent readers are fine; writes are serialized by the owning ingestor.
    """

    def __init__(self, paths: ProjectPaths):
        self.paths = paths

    def _manifest(self) -> dict:
        if self.paths.manifest.exists():
            return read_json(self.paths.manifest)
        return {"next_id": 0, "assets": []}

    def id_for_hash(self, media_hash: str) -> int | None:
        for entry in self._manifest()["assets"]:
            if entry["hash"] == media_hash:
                return entry["id"]
        return None

    def load_asset(self, asset_id: int) -> VideoAsset:
        record = read_json(self.paths.asset_record(asset_id))
        return VideoAsset(
            id=record["id"],
            media_path=Path(record["media_path"]),
            duration_s=record["duration_s"],
            frame_captions=[(int(t), c) for t, c in record["captions"]],
            narration=VisualNarration(title=record["title"], summary=record["summary"]),
            media_hash=record["hash"],
        )

    def all_assets(self) -> list[VideoAsset]:
        return [self.load_asset(entry["id"]) for entry in self._manifest()["assets"]]

    def reserve_id(self) -> int:
        """Bump next_id without listing the asset; the manifest entry is only
        written by store(), so a failed ingest never poisons the hash index."""
        manifest = self._manifest()
        asset_id = manifest["next_id"]
        manifest["next_id"] = asset_id + 1
        write_json(self.paths.manifest, manifest)
        return asset_id

    def release_id(self, asset_id: int) -> None:
        """Undo a reservation if nothing was allocated after it."""
        manifest = self._manifest()
        if manifest["next_id"] == asset_id + 1:
            manifest["next_id"] = asset_id
            write_json(self.paths.manifest, manifest)

    def store(self, asset: VideoAsset) -> None:
        write_json(
            self.paths.asset_record(asset.id),
            {
                "id": asset.id,
                "hash": asset.media_hash,
                "media_path": str(asset.media_path),
                "duration_s": asset.duration_s,
                "captions": [[t, c] for t, c in asset.frame_captions],
                "title": asset.narration.title,
                "summary": asset.narration.summary,
            },
        )
        manifest = self._manifest()
        manifest["assets"] = [e for e in manifest["assets"] if e["id"] != asset.id] + [
            {
                "id": asset.id,
                "hash": asset.media_hash,
                "media_path": str(asset.media_path),
                "duration_s": asset.duration_s,
            }
        ]
        manifest["assets"].sort(key=lambda e: e["id"])
        write_json(self.paths.manifest, manifest)


@dataclass
class IngestReport:
    assets: list[VideoAsset] = field(default_factory=list)
    errors: list[tuple[Path, CutroomError]] = field(default_factory=list)


class Ingestor:
    def __init__(self, provider: Provider, engine: MediaEngine, paths: ProjectPaths):
        self.provider = provider
        self.engine = engine
        self.paths = paths
        self.cache = NarrationCache(paths)
        self._id_lock = threading.Lock()

    def ingest_file(self, media_path: Path) -> VideoAsset:
        media_hash = self._hash_or_raise(media_path)
        cached_id = self.cache.id_for_hash(media_hash)
        if cached_id is not None:
            return self.cache.load_asset(cached_id)

        info = self.engine.probe(media_path)
        duration_s = max(1, int(info.duration_s))

        with self._id_lock:
            asset_id = self.cache.reserve_id()

        try:
            frames_dir = self.paths.frames_dir(asset_id)
            if frames_dir.exists():
                shutil.rmtree(frames_dir)
            frames = []
            for second in range(duration_s):
                image = self.paths.frame_image(asset_id, second)
                self.engine.extract_frame(media_path, second, image)
                frames.append(FrameRef(path=image, index=second))

            try:
                captions = [(f.index, self.provider.caption_frame(f)) for f in frames]
            except CutroomError as exc:
                raise CaptioningFailed(f"captioning failed for {media_path.name}: {exc}") from exc

            narration = self.generate_narration(captions)
        except Exception:
            with self._id_lock:
                self.cache.release_id(asset_id)
            raise

        asset = VideoAsset(
            id=asset_id,
            media_path=media_path,
            duration_s=duration_s,
            frame_captions=captions,
            narration=narration,
            media_hash=media_hash,
        )
        with self._id_lock:
            self.cache.store(asset)
        return asset

    def ingest_directory(self, directory: Path) -> IngestReport:
        report = IngestReport()
        for path in sorted(directory.iterdir()):
            if not path.is_file() or path.suffix.lower() not in MEDIA_SUFFIXES:
                continue
            try:
                report.assets.append(self.ingest_file(path))
            except CutroomError as exc:
                log.warning("skipping %s: %s", path.name, exc)
                report.errors.append((path, exc))
        return report

    def generate_narration(self, frame_captions: list[tuple[int, str]]) -> VisualNarration:
        if not frame_captions:
            raise ValueError("at least one caption is required")
        prompt = self._narration_prompt(frame_captions)
        completion = self.provider.complete(CompletionRequest(prompt=prompt, temperature=0.0))
        narration = _parse_narration(completion)
        if narration is None:
            reminder = (
                prompt
                + "\n\nYour previous reply did not follow the format. Reply with exactly two "
                + 'labeled lines, "TITLE:" and "SUMMARY:", each followed by the text.'
            )
            completion = self.provider.complete(CompletionRequest(prompt=reminder, temperature=0.0))
            narration = _parse_narration(completion)
        if narration is None:
            raise MalformedNarration("completion is missing a TITLE or SUMMARY line")
        return narration

    @staticmethod
    def _narration_prompt(frame_captions: list[tuple[int, str]]) -> str:
        lines = "\n".join(f"{t}: {caption}" for t, caption in frame_captions)
        return load_template("narration_prompt.txt") + "\n\nFrame captions:\n" + lines

    @staticmethod
    def _hash_or_raise(media_path: Path) -> str:
        try:
            return media_content_hash(media_path)
        except OSError as exc:
            raise UndecodableMedia(f"cannot read {media_path}: {exc}") from exc


def _parse_narration(completion: str) -> VisualNarration | None:
    title = None
    summary_lines: list[str] = []
    in_summary = False
    for line in completion.splitlines():
        stripped = line.strip()
        if stripped.startswith("TITLE:"):
            title = stripped[len("TITLE:"):].strip()
            in_summary = False
        elif stripped.startswith("SUMMARY:"):
            summary_lines = [stripped[len("SUMMARY:"):].strip()]
            in_summary = True
        elif in_summary and stripped:
            summary_lines.append(stripped)
    summary = " ".join(part for part in summary_lines if part).strip()
    if not title or not summary:
        return None
    return VisualNarration(title=title[:TITLE_MAX_CHARS], summary=summary)


def narration_line(asset: VideoAsset) -> str:
    """One-line rendering used by every prompt that lists videos."""
    return f"ID={asset.id} | {asset.narration.title}: {asset.narration.summary}"
