"""Token-bounded conversation memory.

The oldest message is the planning preamble and is never evicted; when the
total runs over budget, messages are removed starting with the second oldest
until the total fits again.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import PreambleOverBudget
from ..providers import TokenCounter, heuristic_token_count

DEFAULT_BUDGET = 6000

ROLE_USER = "user"
ROLE_AGENT = "agent"
ROLE_SYSTEM = "system"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str
    tokens: int


class ConversationMemory:
    def __init__(
        self,
        preamble: str,
        budget: int = DEFAULT_BUDGET,
        counter: TokenCounter = heuristic_token_count,
    ):
        self.budget = budget
        self._count = counter
        self.messages: list[ChatMessage] = [
            ChatMessage(role=ROLE_SYSTEM, content=preamble, tokens=counter(preamble))
        ]

    @property
    def preamble(self) -> ChatMessage:
        return self.messages[0]

    @property
    def history(self) -> list[ChatMessage]:
        return self.messages[1:]

    def total_tokens(self) -> int:
        return sum(m.tokens for m in self.messages)

    def append(self, role: str, content: str) -> ChatMessage:
        message = ChatMessage(role=role, content=content, tokens=self._count(content))
        self.messages.append(message)
        return message

    def evict(self) -> list[ChatMessage]:
        """Drop history from the second-oldest message until within budget.

        Returns the removed messages. Raises PreambleOverBudget when even an
        empty history cannot fit.
        """
        if self.preamble.tokens > self.budget:
            raise PreambleOverBudget(
                f"preamble is {self.preamble.tokens} tokens, budget is {self.budget}"
            )
        removed: list[ChatMessage] = []
        while self.total_tokens() > self.budget:
            removed.append(self.messages.pop(1))
        return removed
