"""The plan-and-execute agent state machine.

Two modes. In Planning, a user message becomes a planning prompt, the
completion is parsed into a plan, and the plan is proposed for approval. An
empty user message approves: the first approval enters Executing, and each
approval runs exactly one action. Any non-empty message while Executing
cancels what remains and is routed back through planning. Parse and provider
errors become agent chat replies, never exceptions.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..errors import CutroomError, TranslationMismatch
from ..functions import FunctionOutcome
from ..providers import CompletionRequest, FunctionCall, Provider
from ..templates import load_synonyms, load_template
from .memory import DEFAULT_BUDGET, ROLE_AGENT, ROLE_USER, ConversationMemory
from .plans import (
    STATUS_APPROVED,
    STATUS_EXECUTED,
    STATUS_PROPOSED,
    ActionPlan,
    PlannedAction,
    parse_plan,
    render_plan,
)
from .registry import REGISTRY

MODE_PLANNING = "planning"
MODE_EXECUTING = "executing"

Dispatcher = Callable[[FunctionCall], FunctionOutcome]


def default_preamble() -> str:
    """Role assignment, action descriptions, and format instruction."""
    return "\n\n".join(
        [
            load_template("planning_role.txt"),
            load_template("planning_actions.txt"),
            load_template("planning_format.txt"),
        ]
    )


def build_planning_prompt(memory: ConversationMemory, user_input: str) -> str:
    """Preamble, then surviving history in chronological order, then the new
    user input."""
    parts = [memory.preamble.content]
    for message in memory.history:
        label = "User" if message.role == ROLE_USER else "Agent"
        parts.append(f"{label}: {message.content}")
    parts.append(f"User: {user_input}")
    return "\n\n".join(parts)


@dataclass
class TurnResult:
    """What one user-visible turn produced. Exactly one agent message."""

    agent_message: str
    user_message: str | None = None
    plan: ActionPlan | None = None
    plan_changed: bool = False
    mode: str = MODE_PLANNING
    outcome: FunctionOutcome | None = None
    executed_action: PlannedAction | None = None


class AgentController:
    """One per editing session; transitions are serialized by the session."""

    def __init__(
        self,
        provider: Provider,
        dispatcher: Dispatcher,
        budget: int = DEFAULT_BUDGET,
        max_output_tokens: int = 2048,
        preamble: str | None = None,
        transcript_path: Path | None = None,
    ):
        self.provider = provider
        self.dispatcher = dispatcher
        self.max_output_tokens = max_output_tokens
        self.synonyms = load_synonyms()
        self.memory = ConversationMemory(
            preamble if preamble is not None else default_preamble(),
            budget=budget,
            counter=provider.count_tokens,
        )
        self.transcript: list[dict] = []
        self.transcript_path = transcript_path
        self.mode = MODE_PLANNING
        self.plan: ActionPlan | None = None
        self.approvals = 0
        self.executed = 0

    # -- chat log ---------------------------------------------------------

    def _remember(self, role: str, content: str) -> None:
        self.memory.append(role, content)
        self.memory.evict()
        entry = {"role": role, "content": content, "timestamp": time.time()}
        self.transcript.append(entry)
        if self.transcript_path is not None:
            self.transcript_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.transcript_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def chat_log(self) -> list[dict]:
        return [{"role": e["role"], "content": e["content"]} for e in self.transcript]

    # -- turns ------------------------------------------------------------

    def handle(self, text: str) -> TurnResult:
        """Route one chat input: empty means approve, anything else plans."""
        if text.strip() == "":
            return self.approve_next()
        return self.submit_user_message(text)

    def submit_user_message(self, text: str) -> TurnResult:
        cancelled_note = ""
        plan_changed = False
        if self.mode == MODE_EXECUTING and self.plan is not None:
            count = self.plan.cancel_remaining()
            self.mode = MODE_PLANNING
            plan_changed = True
            if count:
                cancelled_note = f"Cancelled the remaining {count} planned step(s).\n\n"

        prompt = build_planning_prompt(self.memory, text)
        self._remember(ROLE_USER, text)
        try:
            completion = self.provider.complete(
                CompletionRequest(
                    prompt=prompt,
                    max_output_tokens=self.max_output_tokens,
                    temperature=0.0,
                )
            )
            plan = parse_plan(completion, self.synonyms)
        except CutroomError as exc:
            reply = (
                cancelled_note
                + f"I could not turn that into an action plan ({exc}). "
                + "Please rephrase your request."
            )
            self._remember(ROLE_AGENT, reply)
            return TurnResult(
                agent_message=reply,
                user_message=text,
                plan=self.plan,
                plan_changed=plan_changed,
                mode=self.mode,
            )

        self.plan = plan
        reply = (
            cancelled_note
            + "Here is the proposed plan.\n"
            + render_plan(plan)
            + "\nPress enter to approve and run step 1, or reply to revise the plan."
        )
        self._remember(ROLE_AGENT, reply)
        return TurnResult(
            agent_message=reply,
            user_message=text,
            plan=plan,
            plan_changed=True,
            mode=self.mode,
        )

    def approve_next(self) -> TurnResult:
        if self.plan is None or self.plan.finished:
            reply = "There is no pending plan to approve. Tell me what you would like to do."
            self._remember(ROLE_AGENT, reply)
            return TurnResult(agent_message=reply, plan=self.plan, mode=self.mode)

        if self.mode == MODE_PLANNING:
            self.mode = MODE_EXECUTING
        action = self.plan.current
        if action.status == STATUS_PROPOSED:
            action.transition(STATUS_APPROVED)
        self.approvals += 1

        step = self.plan.cursor + 1
        try:
            call = self.translate_action(action)
            outcome = self.dispatcher(call)
        except CutroomError as exc:
            reply = (
                f"Step {step} ({action.function_name}) failed: {exc}\n"
                "The plan is paused. Press enter to retry this step, or reply to change the plan."
            )
            self._remember(ROLE_AGENT, reply)
            return TurnResult(
                agent_message=reply,
                plan=self.plan,
                plan_changed=True,
                mode=self.mode,
            )

        action.transition(STATUS_EXECUTED)
        self.executed += 1
        self.plan.cursor += 1
        if self.plan.finished:
            self.mode = MODE_PLANNING
            reply = outcome.chat_text + "\n\nAll planned steps are complete."
        else:
            upcoming = self.plan.current
            reply = (
                outcome.chat_text
                + f"\n\nNext step: {self.plan.cursor + 1}. {upcoming.function_name}: "
                + f"{upcoming.context}".rstrip()
                + "\nPress enter to run it, or reply to change the plan."
            )
        self._remember(ROLE_AGENT, reply)
        return TurnResult(
            agent_message=reply,
            plan=self.plan,
            plan_changed=True,
            mode=self.mode,
            outcome=outcome,
            executed_action=action,
        )

    def translate_action(self, action: PlannedAction) -> FunctionCall:
        description = f"{action.function_name}: {action.context}".rstrip()
        call = self.provider.translate_call(description, list(REGISTRY.values()))
        if call.name not in REGISTRY:
            raise TranslationMismatch(
                f"translation produced unregistered function {call.name!r}"
            )
        return call
