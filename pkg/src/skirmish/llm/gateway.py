"""Role-level calling convention on top of templates and backends.

Each role pairs a system template with a user template and carries its own
sampling temperature. The augmentation role reuses the coder system prompt
(its user template carries all the rewrite instructions).
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import complete
from .templates import ChatMessage, ChatRequest, TemplateSet, render_prompt, request_digest

ROLE_TEMPLATES = {
    "planner": ("planner.system", "planner.user"),
    "coder": ("coder.system", "coder.user"),
    "critic": ("critic.system", "critic.user"),
    "grpo": ("grpo.system", "grpo.user"),
    "augment": ("coder.system", "augment.user"),
}

DEFAULT_TEMPERATURES = {
    "planner": 0.7,
    "coder": 0.7,
    "critic": 0.2,
    "grpo": 0.7,
    "augment": 0.7,
}

DEFAULT_MODEL = "battle-coder"


@dataclass(frozen=True)
class LlmCall:
    digest: str
    response: str


class Gateway:
    """Renders role prompts and runs them against one backend."""

    def __init__(self, backend, templates: TemplateSet | None = None,
                 model: str = DEFAULT_MODEL,
                 temperatures: dict[str, float] | None = None):
        self.backend = backend
        self.templates = templates if templates is not None else TemplateSet.bundled()
        self.model = model
        self.temperatures = dict(DEFAULT_TEMPERATURES)
        if temperatures:
            self.temperatures.update(temperatures)

    def render(self, role: str, bindings: dict[str, str]) -> list[ChatMessage]:
        system_id, user_id = ROLE_TEMPLATES[role]
        messages = render_prompt(self.templates.get(system_id), bindings)
        messages += render_prompt(self.templates.get(user_id), bindings)
        return messages

    def prompt_text(self, role: str, bindings: dict[str, str]) -> str:
        """The rendered prompt as one string (system + user)."""
        return "\n\n".join(m.content for m in self.render(role, bindings))

    def call(self, role: str, bindings: dict[str, str]) -> LlmCall:
        messages = self.render(role, bindings)
        request = ChatRequest(model=self.model, messages=tuple(messages),
                              temperature=self.temperatures[role])
        response = complete(self.backend, request)
        return LlmCall(digest=request_digest(messages), response=response)
