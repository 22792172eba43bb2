"""Session orchestration: one project + one agent per session, surfaced to the
UI as a totally ordered event stream.

Every state the UI shows is carried by events (chat_message, gallery_order,
timeline_state, trim_window, plan_status); replaying a session's full event
log against an empty :class:`UiModel` reproduces the server's current view.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..agent.controller import AgentController, TurnResult
from ..agent.plans import ActionPlan
from ..config import AppConfig
from ..errors import ProjectNotFound, SessionNotFound
from ..functions import ActionExecutor, ClipTrim, GalleryReorder, TimelineReorder, TrimResult
from ..media import MediaEngine
from ..project import Project
from ..providers import Provider
from ..storage import ProjectPaths
from ..vectorstore import VectorStore

KIND_CHAT = "chat_message"
KIND_GALLERY = "gallery_order"
KIND_TIMELINE = "timeline_state"
KIND_TRIM = "trim_window"
KIND_PLAN = "plan_status"


@dataclass(frozen=True)
class UiEvent:
    seq: int
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload}


def plan_payload(plan: ActionPlan | None, mode: str) -> dict:
    if plan is None:
        return {"goal": None, "actions": [], "cursor": 0, "mode": mode}
    return {
        "goal": plan.goal,
        "actions": [
            {"name": a.function_name, "context": a.context, "status": a.status}
            for a in plan.actions
        ],
        "cursor": plan.cursor,
        "mode": mode,
    }


class Session:
    def __init__(
        self,
        project: Project,
        provider: Provider,
        store: VectorStore,
        config: AppConfig,
        session_id: str | None = None,
    ):
        self.id = session_id or uuid.uuid4().hex[:12]
        self.project = project
        self.provider = provider
        self.store = store
        self.config = config
        self.events: list[UiEvent] = []
        self._seq = 0
        self._lock = threading.RLock()
        self.last_artifact: dict | None = None

        self.executor = ActionExecutor(
            provider, store, project, prompt_budget=config.provider.prompt_budget
        )
        self.agent = AgentController(
            provider,
            dispatcher=self.executor.execute_call,
            budget=config.service.memory_budget,
            max_output_tokens=config.provider.max_output_tokens,
            transcript_path=project.paths.chat_dir / f"session_{self.id}.jsonl",
        )
        self._emit(KIND_GALLERY, self._gallery_payload())
        self._emit(KIND_TIMELINE, self._timeline_payload())

    # -- events ---------------------------------------------------------------

    def _emit(self, kind: str, payload: dict) -> UiEvent:
        self._seq += 1
        event = UiEvent(seq=self._seq, kind=kind, payload=payload)
        self.events.append(event)
        return event

    def events_after(self, seq: int) -> list[UiEvent]:
        return [e for e in self.events if e.seq > seq]

    def _gallery_payload(self, distances: list[list] | None = None) -> dict:
        payload = {
            "order": list(self.project.gallery.display_order),
            "selection": sorted(self.project.gallery.selection),
        }
        if distances is not None:
            payload["distances"] = distances
        return payload

    def _timeline_payload(self) -> dict:
        return {"clips": self.project.timeline_state()}

    def _emit_effect(self, effect: Any) -> None:
        if isinstance(effect, GalleryReorder):
            distances = [[asset_id, dist] for asset_id, dist in effect.ranking.items]
            self._emit(KIND_GALLERY, self._gallery_payload(distances=distances))
        elif isinstance(effect, TimelineReorder):
            self._emit(KIND_TIMELINE, self._timeline_payload())
        elif isinstance(effect, ClipTrim):
            self._emit(
                KIND_TRIM,
                {
                    "asset_id": effect.asset_id,
                    "start_s": effect.start_s,
                    "end_s": effect.end_s,
                    "rationale": effect.rationale,
                    "matched": True,
                },
            )

    # -- chat ----------------------------------------------------------------------

    def post_chat(self, text: str) -> list[UiEvent]:
        with self._lock:
            first = len(self.events)
            result: TurnResult = self.agent.handle(text)
            if result.user_message is not None:
                self._emit(KIND_CHAT, {"role": "user", "content": result.user_message})
            if result.outcome is None:
                if result.plan_changed:
                    self._emit(KIND_PLAN, plan_payload(result.plan, result.mode))
                self._emit(KIND_CHAT, {"role": "agent", "content": result.agent_message})
            else:
                self._emit(KIND_CHAT, {"role": "agent", "content": result.agent_message})
                self._emit_effect(result.outcome.ui_effect)
                if result.plan_changed:
                    self._emit(KIND_PLAN, plan_payload(result.plan, result.mode))
            return self.events[first:]

    # -- direct manipulation ------------------------------------------------------------

    def direct_edit(self, command: dict) -> tuple[list[UiEvent], dict | None]:
        with self._lock:
            first = len(self.events)
            op = command.get("op")
            extra: dict | None = None
            if op == "add":
                self.project.add_to_timeline([int(i) for i in command["ids"]])
                self._emit(KIND_TIMELINE, self._timeline_payload())
            elif op == "reorder":
                self.project.reorder([int(i) for i in command["order"]])
                self._emit(KIND_TIMELINE, self._timeline_payload())
            elif op == "trim":
                self.project.set_trim(
                    int(command["asset_id"]),
                    int(command["start_s"]),
                    int(command["end_s"]),
                    rationale=None,
                )
                self._emit(
                    KIND_TRIM,
                    {
                        "asset_id": int(command["asset_id"]),
                        "start_s": int(command["start_s"]),
                        "end_s": int(command["end_s"]),
                        "rationale": None,
                        "matched": True,
                    },
                )
                self._emit(KIND_TIMELINE, self._timeline_payload())
            elif op == "remove":
                ids = command.get("ids")
                self.project.remove(None if command.get("all") else [int(i) for i in ids])
                self._emit(KIND_TIMELINE, self._timeline_payload())
            elif op == "undo":
                self.project.undo()
                self._emit(KIND_TIMELINE, self._timeline_payload())
            elif op == "render":
                artifact = self.project.render_preview()
                extra = {
                    "output": str(artifact.output_path),
                    "segments": [list(s) for s in artifact.segments],
                    "total_duration_s": artifact.total_duration_s,
                }
                self.last_artifact = extra
            elif op == "select":
                self.project.set_selection([int(i) for i in command["ids"]], bool(command["selected"]))
                self._emit(KIND_GALLERY, self._gallery_payload())
            else:
                raise ValueError(f"unknown timeline op {op!r}")
            return self.events[first:], extra

    def trim_command(self, asset_id: int, command: str) -> tuple[list[UiEvent], TrimResult]:
        with self._lock:
            first = len(self.events)
            result = self.executor.trim_command(asset_id, command)
            self._emit(
                KIND_TRIM,
                {
                    "asset_id": asset_id,
                    "start_s": result.start_s,
                    "end_s": result.end_s,
                    "rationale": result.rationale,
                    "matched": result.matched,
                },
            )
            if result.matched and result.start_s < result.end_s:
                self._emit(KIND_TIMELINE, self._timeline_payload())
            return self.events[first:], result

    # -- view ---------------------------------------------------------------------------

    def current_view(self) -> dict:
        return {
            "gallery_order": list(self.project.gallery.display_order),
            "selection": sorted(self.project.gallery.selection),
            "timeline": self.project.timeline_state(),
            "chat": self.agent.chat_log(),
            "plan": plan_payload(self.agent.plan, self.agent.mode),
        }


class UiModel:
    """Pure event-replay model; the UI-side contract mirrored in Python so the
    service suite can assert replay determinism."""

    def __init__(self):
        self.gallery_order: list[int] = []
        self.selection: list[int] = []
        self.timeline: list[dict] = []
        self.chat: list[dict] = []
        self.plan: dict = plan_payload(None, "planning")
        self.last_trim: dict | None = None

    def apply(self, event: UiEvent | dict) -> None:
        data = event.to_dict() if isinstance(event, UiEvent) else event
        kind, payload = data["kind"], data["payload"]
        if kind == KIND_CHAT:
            self.chat.append({"role": payload["role"], "content": payload["content"]})
        elif kind == KIND_GALLERY:
            self.gallery_order = list(payload["order"])
            self.selection = list(payload["selection"])
        elif kind == KIND_TIMELINE:
            self.timeline = [dict(c) for c in payload["clips"]]
        elif kind == KIND_PLAN:
            self.plan = dict(payload)
        elif kind == KIND_TRIM:
            self.last_trim = dict(payload)

    def replay(self, events: list[UiEvent | dict]) -> "UiModel":
        for event in events:
            self.apply(event)
        return self

    def snapshot(self) -> dict:
        return {
            "gallery_order": list(self.gallery_order),
            "selection": list(self.selection),
            "timeline": [dict(c) for c in self.timeline],
            "chat": [dict(m) for m in self.chat],
            "plan": dict(self.plan),
        }


class SessionManager:
    def __init__(self, config: AppConfig, provider: Provider, engine: MediaEngine):
        self.config = config
        self.provider = provider
        self.engine = engine
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def open_session(self, project_root: Path | str) -> Session:
        root = Path(project_root)
        paths = ProjectPaths(root=root)
        if paths.document.exists():
            project = Project.open(root, engine=self.engine, undo_limit=self.config.service.undo_limit)
        elif paths.manifest.exists():
            project = Project.from_cache(root, engine=self.engine, undo_limit=self.config.service.undo_limit)
            project.save()
        else:
            raise ProjectNotFound(f"no project at {root}")
        store = VectorStore(self.provider, paths)
        session = Session(project, self.provider, store, self.config)
        with self._lock:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise SessionNotFound(f"no open session {session_id!r}")
        return session

    def close_session(self, session_id: str) -> None:
        session = self.get(session_id)
        session.project.save()
        with self._lock:
            del self.sessions[session_id]
