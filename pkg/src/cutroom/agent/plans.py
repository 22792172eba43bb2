"""Action plans: the GOAL/ACTIONS completion format, parsing, and rendering.

``parse_plan(render_plan(plan))`` is the identity on (goal, [name, context])
for any plan in the canonical format; the planner's format instruction asks
for exactly that format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import MissingActions, MissingGoal
from .registry import resolve_function_name

STATUS_PROPOSED = "proposed"
STATUS_APPROVED = "approved"
STATUS_EXECUTED = "executed"
STATUS_CANCELLED = "cancelled"

_TRANSITIONS = {
    STATUS_PROPOSED: {STATUS_APPROVED, STATUS_CANCELLED},
    STATUS_APPROVED: {STATUS_EXECUTED, STATUS_CANCELLED},
    STATUS_EXECUTED: set(),
    STATUS_CANCELLED: set(),
}

_BULLET = re.compile(r"^\s*(?:\d+[.)]|-)\s*(.+)$")


@dataclass
class PlannedAction:
    function_name: str
    context: str = ""
    status: str = STATUS_PROPOSED

    def transition(self, new_status: str) -> None:
        if new_status not in _TRANSITIONS[self.status]:
            raise ValueError(f"illegal status transition {self.status} -> {new_status}")
        self.status = new_status


@dataclass
class ActionPlan:
    goal: str
    actions: list[PlannedAction]
    cursor: int = 0

    def __post_init__(self) -> None:
        if not self.actions:
            raise MissingActions("a plan needs at least one action")

    @property
    def finished(self) -> bool:
        return self.cursor >= len(self.actions)

    @property
    def current(self) -> PlannedAction:
        return self.actions[self.cursor]

    def cancel_remaining(self) -> int:
        cancelled = 0
        for action in self.actions[self.cursor:]:
            if action.status in (STATUS_PROPOSED, STATUS_APPROVED):
                action.transition(STATUS_CANCELLED)
                cancelled += 1
        self.cursor = len(self.actions)
        return cancelled


def parse_plan(completion: str, synonyms: dict[str, str] | None = None) -> ActionPlan:
    """Extract a plan from a completion.

    The goal is whatever follows the capitalized word GOAL; action lines are
    the numbered lines after the capitalized word ACTIONS, each split at its
    first colon into a function name (fuzzy-matched against the registry) and
    a context.
    """
    lines = completion.splitlines()
    goal: str | None = None
    actions_at: int | None = None
    for i, line in enumerate(lines):
        stripped = line.strip()
        if goal is None and stripped.startswith("GOAL"):
            goal = stripped[len("GOAL"):].lstrip(":").strip()
        elif stripped.startswith("ACTIONS"):
            actions_at = i
            break
    if goal is None:
        raise MissingGoal("completion has no GOAL section")
    if actions_at is None:
        raise MissingActions("completion has no ACTIONS section")

    actions: list[PlannedAction] = []
    for line in lines[actions_at + 1:]:
        match = _BULLET.match(line)
        if not match:
            continue
        body = match.group(1)
        raw_name, _, context = body.partition(":")
        actions.append(
            PlannedAction(
                function_name=resolve_function_name(raw_name, synonyms),
                context=context.strip(),
            )
        )
    if not actions:
        raise MissingActions("ACTIONS section contains no action lines")
    return ActionPlan(goal=goal, actions=actions)


def render_plan(plan: ActionPlan) -> str:
    """The canonical GOAL/ACTIONS block (what parse_plan round-trips on)."""
    lines = [f"GOAL: {plan.goal}", "ACTIONS:"]
    for i, action in enumerate(plan.actions, start=1):
        lines.append(f"{i}. {action.function_name}: {action.context}".rstrip())
    return "\n".join(lines)
