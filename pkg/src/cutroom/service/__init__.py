from .session import Session, SessionManager, UiEvent, UiModel

__all__ = ["Session", "SessionManager", "UiEvent", "UiModel"]
