"""Operator CLI: ingest footage, rebuild the vector index, serve the API, and
replay scripted conversations headlessly (the backbone of end-to-end tests)."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import yaml

from ..config import AppConfig
from ..errors import CutroomError
from ..media import StubEngine, default_engine
from ..narration import Ingestor, NarrationCache
from ..project import Project
from ..providers import CallLog, Provider, ScriptedProvider
from ..storage import ProjectPaths
from ..vectorstore import VectorStore, rebuild_index
from .session import SessionManager


def _load_config(path: str | None) -> AppConfig:
    return AppConfig.load(path) if path else AppConfig()


def _build_provider(config: AppConfig, mock_script: str | None, log_path: Path | None) -> Provider:
    log = CallLog(log_path)
    if mock_script:
        with open(mock_script, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        return ScriptedProvider.from_config(data.get("provider", data), log=log)
    from ..providers.http import HttpProvider

    return HttpProvider(config.provider, log=log)


def _log_path(config: AppConfig, project_root: Path) -> Path | None:
    if config.service.call_log:
        return project_root / config.service.call_log
    return None


@click.group()
def main() -> None:
    """Video editing backend with an LLM editing agent."""


@main.command()
@click.argument("media_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--project", "project_root", required=True, type=click.Path(path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mock-script", type=click.Path(exists=True), default=None,
              help="Run against a scripted provider instead of a live one.")
@click.option("--index/--no-index", default=True, help="Embed narrations into the vector index.")
def ingest(media_dir: Path, project_root: Path, config_path: str | None,
           mock_script: str | None, index: bool) -> None:
    """Ingest every video in MEDIA_DIR into the project."""
    config = _load_config(config_path)
    provider = _build_provider(config, mock_script, _log_path(config, project_root))
    paths = ProjectPaths(root=project_root)
    ingestor = Ingestor(provider, default_engine(), paths)
    report = ingestor.ingest_directory(media_dir)
    for asset in report.assets:
        click.echo(f"[{asset.id}] {asset.narration.title} ({asset.duration_s}s)")
    for path, error in report.errors:
        click.echo(f"ERROR {path.name}: {error}", err=True)
    if index:
        store = VectorStore(provider, paths)
        for asset in report.assets:
            store.upsert(asset)
    if paths.document.exists():
        # existing project: grow the gallery, leave the timeline alone
        project = Project.open(project_root, engine=default_engine())
        for asset in NarrationCache(paths).all_assets():
            if asset.id not in project.gallery.assets:
                project.add_asset(asset)
    else:
        project = Project.from_cache(project_root, engine=default_engine())
    project.save()
    click.echo(f"{len(report.assets)} asset(s) ready, {len(report.errors)} error(s)")
    if report.errors:
        sys.exit(1)


@main.command()
@click.option("--project", "project_root", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
def reindex(project_root: Path, config_path: str | None, mock_script: str | None) -> None:
    """Rebuild the vector index from the narration cache."""
    config = _load_config(config_path)
    provider = _build_provider(config, mock_script, _log_path(config, project_root))
    paths = ProjectPaths(root=project_root)
    store = rebuild_index(provider, paths)
    click.echo(f"indexed {len(store)} narration(s)")


@main.command()
@click.option("--project", "project_root", type=click.Path(exists=True, file_okay=False), default=None,
              help="Project opened for every new session when the client sends none.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--frontend", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory with the built web UI to serve at /.")
def serve(project_root: str | None, config_path: str | None, host: str | None,
          port: int | None, mock_script: str | None, frontend: str | None) -> None:
    """Run the session API."""
    import uvicorn

    from .api import create_app

    config = _load_config(config_path)
    provider = _build_provider(
        config, mock_script, _log_path(config, Path(project_root)) if project_root else None
    )
    app = create_app(
        config,
        provider=provider,
        frontend_dir=Path(frontend) if frontend else None,
    )
    if project_root:
        app.state.default_project = project_root
    uvicorn.run(app, host=host or config.service.host, port=port or config.service.port)


@main.command()
@click.argument("script", type=click.Path(exists=True, path_type=Path))
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Write the final state JSON here instead of stdout.")
def replay(script: Path, out: Path | None) -> None:
    """Replay a scripted conversation headlessly and dump the final state.

    The script is YAML with keys: project (path, relative to the script),
    provider (scripted rules), conversation (list of chat inputs, "" approves),
    and optional durations (media path -> seconds, for the stub media engine).
    """
    with open(script, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)

    project_root = Path(data["project"])
    if not project_root.is_absolute():
        project_root = (script.parent / project_root).resolve()
    config = AppConfig.from_dict(data.get("config", {}))
    provider = ScriptedProvider.from_config(data.get("provider", {}), log=CallLog())
    engine = StubEngine(durations=data.get("durations"), default_duration_s=10)

    manager = SessionManager(config, provider, engine)
    session = manager.open_session(project_root)
    transcript_events = [e.to_dict() for e in session.events]
    for text in data.get("conversation", []):
        try:
            events = session.post_chat(text if text is not None else "")
        except CutroomError as exc:
            click.echo(f"ERROR {exc.code}: {exc}", err=True)
            sys.exit(1)
        transcript_events.extend(e.to_dict() for e in events)

    session.project.save()
    state = {
        "view": session.current_view(),
        "document": session.project.to_document(),
        "events": transcript_events,
    }
    rendered = json.dumps(state, indent=2, sort_keys=True)
    if out:
        out.write_text(rendered + "\n", encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(rendered)


if __name__ == "__main__":
    main()
