"""Project directory layout and canonical JSON serialization.

One directory per project:

    project.json             the project document (versioned schema)
    narrations/manifest.json id allocation + content-hash index
    narrations/asset_NNNN.json  per-asset captions + title + summary
    vectors/asset_NNNN.json  per-asset embedding record
    frames/NNNN/tNNNN.jpg    per-second frames (thumbnails come from these)
    chat/                    append-only session transcripts
    previews/                rendered previews + manifests
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Any


def canonical_json(data: Any) -> str:
    """Stable serialization used wherever documents are compared or hashed."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: Path, data: Any) -> None:
    """Atomic replace, so concurrent readers see the old or new document but
    never a torn one."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(data))
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def read_json(path: Path) -> Any:
    return json.loads(path.read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ProjectPaths:
    root: Path

    @property
    def document(self) -> Path:
        return self.root / "project.json"

    @property
    def narrations(self) -> Path:
        return self.root / "narrations"

    @property
    def manifest(self) -> Path:
        return self.narrations / "manifest.json"

    def asset_record(self, asset_id: int) -> Path:
        return self.narrations / f"asset_{asset_id:04d}.json"

    @property
    def vectors(self) -> Path:
        return self.root / "vectors"

    def vector_record(self, asset_id: int) -> Path:
        return self.vectors / f"asset_{asset_id:04d}.json"

    def frames_dir(self, asset_id: int) -> Path:
        return self.root / "frames" / f"{asset_id:04d}"

    def frame_image(self, asset_id: int, second: int) -> Path:
        return self.frames_dir(asset_id) / f"t{second:04d}.jpg"

    @property
    def chat_dir(self) -> Path:
        return self.root / "chat"

    @property
    def previews(self) -> Path:
        return self.root / "previews"
