from __future__ import annotations

from pathlib import Path

import pytest

from cutroom.media import StubEngine
from cutroom.narration import VideoAsset, VisualNarration
from cutroom.project import Project
from cutroom.providers import ProviderScript, ScriptRule, ScriptedProvider
from cutroom.storage import ProjectPaths

GOLDEN_DIR = Path(__file__).parent / "golden"


def golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text(encoding="utf-8").rstrip("\n")


def make_asset(
    asset_id: int,
    duration_s: int = 10,
    title: str | None = None,
    summary: str | None = None,
    media_path: Path | None = None,
) -> VideoAsset:
    return VideoAsset(
        id=asset_id,
        media_path=media_path or Path(f"/media/clip_{asset_id}.mp4"),
        duration_s=duration_s,
        frame_captions=[(t, f"second {t} of video {asset_id}") for t in range(duration_s)],
        narration=VisualNarration(
            title=title or f"Video {asset_id}",
            summary=summary or f"Summary of video {asset_id}.",
        ),
        media_hash=f"hash{asset_id:04d}",
    )


def make_project(
    root: Path,
    n_assets: int = 3,
    duration_s: int = 10,
    engine=None,
    create_media: bool = True,
) -> Project:
    """Project with n stub-backed assets; media files are placeholder bytes the
    stub engine resolves through its duration map."""
    paths = ProjectPaths(root=root)
    media_dir = root / "media"
    durations = {}
    assets = []
    for i in range(n_assets):
        media = media_dir / f"clip_{i}.mp4"
        if create_media:
            media.parent.mkdir(parents=True, exist_ok=True)
            media.write_bytes(b"stub media %d" % i)
        durations[str(media)] = float(duration_s)
        assets.append(make_asset(i, duration_s=duration_s, media_path=media))
    project = Project(paths, engine=engine or StubEngine(durations=durations))
    for asset in assets:
        project.add_asset(asset)
    return project


def narration_response(title: str, summary: str) -> str:
    return f"TITLE: {title}\nSUMMARY: {summary}"


@pytest.fixture
def paths(tmp_path: Path) -> ProjectPaths:
    return ProjectPaths(root=tmp_path / "proj")


@pytest.fixture
def scripted_provider() -> ScriptedProvider:
    """Provider whose completions fall back to a fixed narration, good enough
    for ingestion-shaped tests."""
    return ScriptedProvider(
        completion_script=ProviderScript(
            fallback=narration_response("A Clip", "Something happens.")
        ),
        embedding_dim=32,
    )


def rule(match: str, response) -> ScriptRule:
    return ScriptRule.substring(match, response)


TRAVEL_PLAN = (
    "GOAL: Make a travel video\n"
    "ACTIONS:\n"
    "1. Retrieve: Strolling around the Eiffel Tower\n"
    "2. Storyboard: day to night"
)

TRAVEL_STORYBOARD = (
    '{"storyboard": "Scene 1: River Market (ID=2), opening bustle. '
    'Scene 2: Beach Walk (ID=0), golden hour. '
    'Scene 3: Old Town Lanes (ID=1), night close.", "video_ids": [2, 0, 1]}'
)

TRAVEL_TITLES = {
    0: ("Beach Walk", "Sea foam and sand at golden hour."),
    1: ("Old Town Lanes", "Wandering narrow cobbled streets."),
    2: ("River Market", "Boats and stalls waking up at dawn."),
}


def travel_provider() -> ScriptedProvider:
    """Deterministic provider for the travel-video scenario: a two-step plan,
    a pinned storyboard, and embed vectors that rank the gallery 1, 2, 0 for
    the scripted query."""
    return ScriptedProvider(
        completion_script=ProviderScript(
            rules=[
                rule("make a travel video", TRAVEL_PLAN),
                rule("devise a storyboard", TRAVEL_STORYBOARD),
            ]
        ),
        embed_script=ProviderScript(
            rules=[
                rule("Strolling around the Eiffel Tower", [1.0, 0.0, 0.0, 0.0]),
                rule("Old Town Lanes", [1.0, 0.0, 0.0, 0.0]),
                rule("River Market", [1.0, 1.0, 0.0, 0.0]),
                rule("Beach Walk", [0.0, 1.0, 0.0, 0.0]),
            ]
        ),
        embedding_dim=4,
    )


def build_travel_project(root: Path, provider: ScriptedProvider) -> StubEngine:
    """Persist a three-asset project (cache, vectors, document) under root so
    a SessionManager can open it; returns the stub engine wired to its media."""
    from cutroom.narration import NarrationCache
    from cutroom.vectorstore import VectorStore

    paths = ProjectPaths(root=root)
    durations = {}
    media_dir = root / "media"
    assets = []
    for i, (title, summary) in TRAVEL_TITLES.items():
        media = media_dir / f"clip_{i}.mp4"
        media.parent.mkdir(parents=True, exist_ok=True)
        media.write_bytes(b"stub media %d" % i)
        durations[str(media)] = 10.0
        assets.append(
            make_asset(i, duration_s=10, title=title, summary=summary, media_path=media)
        )
    engine = StubEngine(durations=durations)
    project = Project(paths, engine=engine)
    cache = NarrationCache(paths)
    store = VectorStore(provider, paths)
    for asset in assets:
        project.add_asset(asset)
        cache.reserve_id()
        cache.store(asset)
        store.upsert(asset)
    project.save()
    return engine
