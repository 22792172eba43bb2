from .controller import AgentController, TurnResult, build_planning_prompt, default_preamble
from .memory import ChatMessage, ConversationMemory
from .plans import ActionPlan, PlannedAction, parse_plan, render_plan
from .registry import REGISTRY, resolve_function_name

__all__ = [
    "REGISTRY",
    "ActionPlan",
    "AgentController",
    "ChatMessage",
    "ConversationMemory",
    "PlannedAction",
    "TurnResult",
    "build_planning_prompt",
    "default_preamble",
    "parse_plan",
    "render_plan",
    "resolve_function_name",
]
