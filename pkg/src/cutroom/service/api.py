"""HTTP surface: JSON request/response endpoints plus a per-session event
stream (SSE, with a polling endpoint for reconnect/replay).

Domain errors map to machine-readable codes; provider credentials never leave
the process (the config echo is redacted).
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from ..config import AppConfig, redact
from ..errors import (
    ClipNotOnTimeline,
    CutroomError,
    ProjectNotFound,
    SessionNotFound,
    UnknownAsset,
)
from ..media import MediaEngine, default_engine
from ..providers import Provider
from .session import SessionManager

_NOT_FOUND = (ProjectNotFound, SessionNotFound, UnknownAsset, ClipNotOnTimeline)


def _error_response(exc: CutroomError) -> JSONResponse:
    status = 404 if isinstance(exc, _NOT_FOUND) else 400
    return JSONResponse(
        status_code=status,
        content={"error": {"code": exc.code, "message": str(exc)}},
    )


def create_app(
    config: AppConfig | None = None,
    provider: Provider | None = None,
    engine: MediaEngine | None = None,
    frontend_dir: Path | None = None,
) -> FastAPI:
    config = config or AppConfig()
    if provider is None:
        from ..providers.http import HttpProvider

        provider = HttpProvider(config.provider)
    engine = engine or default_engine()

    app = FastAPI(title="cutroom")
    manager = SessionManager(config, provider, engine)
    app.state.manager = manager

    @app.exception_handler(CutroomError)
    async def handle_domain_error(_request: Request, exc: CutroomError):
        return _error_response(exc)

    @app.get("/api/config")
    def get_config() -> dict:
        return {"config": redact(config.to_dict())}

    @app.post("/api/sessions")
    async def open_session(body: dict | None = None) -> dict:
        project = (body or {}).get("project") or getattr(app.state, "default_project", None)
        if not project:
            raise ProjectNotFound("no project path given and no default configured")
        session = manager.open_session(project)
        return {
            "session_id": session.id,
            "events": [e.to_dict() for e in session.events],
        }

    @app.delete("/api/sessions/{sid}")
    def close_session(sid: str) -> dict:
        manager.close_session(sid)
        return {"closed": True}

    @app.get("/api/sessions/{sid}/events")
    def poll_events(sid: str, after: int = 0) -> dict:
        session = manager.get(sid)
        return {"events": [e.to_dict() for e in session.events_after(after)]}

    @app.get("/api/sessions/{sid}/stream")
    async def stream_events(
        sid: str, request: Request, after: int = 0, limit: int | None = None
    ) -> StreamingResponse:
        """Server-push event stream; ``limit`` closes it after that many events
        (handy for scripted clients), otherwise it runs until disconnect."""
        session = manager.get(sid)

        async def generate():
            cursor = after
            sent = 0
            while limit is None or sent < limit:
                if await request.is_disconnected():
                    return
                for event in session.events_after(cursor):
                    cursor = event.seq
                    sent += 1
                    yield f"data: {json.dumps(event.to_dict())}\n\n"
                    if limit is not None and sent >= limit:
                        return
                await asyncio.sleep(0.1)

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.post("/api/sessions/{sid}/chat")
    def post_chat(sid: str, body: dict) -> dict:
        session = manager.get(sid)
        events = session.post_chat(body.get("text", ""))
        return {"events": [e.to_dict() for e in events]}

    @app.post("/api/sessions/{sid}/approve")
    def approve(sid: str) -> dict:
        """Same as posting empty chat text: run the next planned step."""
        session = manager.get(sid)
        events = session.post_chat("")
        return {"events": [e.to_dict() for e in events]}

    @app.post("/api/sessions/{sid}/timeline/{op}")
    def timeline_edit(sid: str, op: str, body: dict | None = None) -> dict:
        session = manager.get(sid)
        command = {"op": op, **(body or {})}
        events, extra = session.direct_edit(command)
        response = {"events": [e.to_dict() for e in events]}
        if extra is not None:
            response["artifact"] = extra
        return response

    @app.post("/api/sessions/{sid}/clips/{asset_id}/trim-command")
    def clip_trim_command(sid: str, asset_id: int, body: dict) -> dict:
        session = manager.get(sid)
        events, result = session.trim_command(asset_id, body["command"])
        return {
            "events": [e.to_dict() for e in events],
            "result": {
                "start_s": result.start_s,
                "end_s": result.end_s,
                "rationale": result.rationale,
                "matched": result.matched,
            },
        }

    @app.get("/api/sessions/{sid}/gallery")
    def get_gallery(sid: str) -> dict:
        session = manager.get(sid)
        project = session.project
        on_timeline = set(project.timeline_ids())
        cards = []
        for asset_id in project.gallery.display_order:
            asset = project.asset(asset_id)
            cards.append(
                {
                    "id": asset.id,
                    "title": asset.narration.title,
                    "summary": asset.narration.summary,
                    "duration_s": asset.duration_s,
                    "selected": asset.id in project.gallery.selection,
                    "on_timeline": asset.id in on_timeline,
                    "thumbnail": f"/api/sessions/{sid}/assets/{asset.id}/frames/0",
                }
            )
        return {"cards": cards}

    @app.get("/api/sessions/{sid}/timeline")
    def get_timeline(sid: str) -> dict:
        session = manager.get(sid)
        return {"clips": session.project.timeline_state()}

    @app.get("/api/sessions/{sid}/view")
    def get_view(sid: str) -> dict:
        return {"view": manager.get(sid).current_view()}

    @app.post("/api/sessions/{sid}/save")
    def save_project(sid: str) -> dict:
        manager.get(sid).project.save()
        return {"saved": True}

    @app.get("/api/sessions/{sid}/preview")
    def get_preview(sid: str):
        session = manager.get(sid)
        if session.last_artifact is None:
            return JSONResponse(
                status_code=404,
                content={"error": {"code": "NoPreviewRendered", "message": "render a preview first"}},
            )
        return FileResponse(session.last_artifact["output"])

    @app.get("/api/sessions/{sid}/assets/{asset_id}/frames")
    def list_frames(sid: str, asset_id: int) -> dict:
        session = manager.get(sid)
        asset = session.project.asset(asset_id)
        base = f"/api/sessions/{sid}/assets/{asset_id}/frames"
        frames = [f"{base}/{t}" for t in range(asset.duration_s)]
        return {
            "frames": frames,
            "thumbnails": {
                "start": f"{base}/0",
                "mid": f"{base}/{asset.duration_s // 2}",
                "end": f"{base}/{asset.duration_s - 1}",
            },
        }

    @app.get("/api/sessions/{sid}/assets/{asset_id}/frames/{second}")
    def get_frame(sid: str, asset_id: int, second: int):
        session = manager.get(sid)
        session.project.asset(asset_id)
        path = session.project.paths.frame_image(asset_id, second)
        if not path.exists():
            return JSONResponse(
                status_code=404,
                content={"error": {"code": "FrameNotFound", "message": str(path)}},
            )
        return FileResponse(path)

    if frontend_dir is not None and Path(frontend_dir).exists():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="webui")

    return app
