"""Prompt templates with UPPERCASE placeholders.

Templates ship as plain text files (``templates/<template-id>.txt``) so they
can be inspected and diffed. The known placeholder set is fixed; loading a
template flags any other multi-word ALL-CAPS run as an unknown placeholder,
and rendering fails if a placeholder in the text has no binding.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

PLACEHOLDERS = ("TASK INFORMATION", "PROMOTION", "TACTICS", "CODE", "RESULT", "HISTORY")

TEMPLATE_IDS = (
    "planner.system", "planner.user",
    "coder.system", "coder.user",
    "critic.system", "critic.user",
    "grpo.system", "grpo.user",
    "augment.user",
)

_PLACEHOLDER_RES = {p: re.compile(rf"(?<![A-Z]){re.escape(p)}(?![A-Z])") for p in PLACEHOLDERS}
_CAPS_RUN_RE = re.compile(r"\b[A-Z][A-Z_]+(?: [A-Z][A-Z_]+)+\b")


class RenderError(Exception):
    """A placeholder present in the template was not bound."""

    def __init__(self, placeholder: str):
        super().__init__(f"unbound placeholder: {placeholder}")
        self.placeholder = placeholder


class TemplateError(Exception):
    """A template file is missing or contains an unknown placeholder."""


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    text: str

    def placeholders(self) -> tuple[str, ...]:
        return tuple(p for p in PLACEHOLDERS if _PLACEHOLDER_RES[p].search(self.text))

    def validate(self) -> None:
        for run in _CAPS_RUN_RE.findall(self.text):
            if run not in PLACEHOLDERS:
                raise TemplateError(
                    f"{self.template_id}: unknown placeholder-like text {run!r}")

    @property
    def role(self) -> str:
        return "system" if self.template_id.endswith(".system") else "user"


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user" | "assistant"
    content: str


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.7

    def validate(self) -> None:
        if not self.messages:
            raise ValueError("request has no messages")
        if self.messages[0].role != "system":
            raise ValueError("first message must have the system role")
        for m in self.messages:
            if m.role not in ("system", "user", "assistant"):
                raise ValueError(f"unknown role {m.role!r}")
            if not m.content:
                raise ValueError("message contents must be non-empty")


def request_digest(messages) -> str:
    """Stable hash of rendered messages; the transcript key for replay."""
    payload = json.dumps([{"role": m.role, "content": m.content} for m in messages],
                         sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def render_prompt(template: PromptTemplate, bindings: dict[str, str]) -> list[ChatMessage]:
    """Substitute bindings byte-exactly; RenderError on any unbound placeholder."""
    present = template.placeholders()
    for p in present:
        if p not in bindings:
            raise RenderError(p)
    if present:
        pattern = re.compile("|".join(re.escape(p) for p in present))
        text = pattern.sub(lambda m: bindings[m.group(0)], template.text)
    else:
        text = template.text
    return [ChatMessage(role=template.role, content=text)]


class TemplateSet:
    """All templates from one directory, loaded and validated eagerly."""

    def __init__(self, templates: dict[str, PromptTemplate]):
        self._templates = templates

    @classmethod
    def from_dir(cls, directory: Path | str) -> "TemplateSet":
        directory = Path(directory)
        templates = {}
        for template_id in TEMPLATE_IDS:
            path = directory / f"{template_id}.txt"
            if not path.exists():
                raise TemplateError(f"missing template file: {path}")
            t = PromptTemplate(template_id, path.read_text(encoding="utf-8"))
            t.validate()
            templates[template_id] = t
        return cls(templates)

    @classmethod
    def bundled(cls) -> "TemplateSet":
        root = resources.files("skirmish") / "data" / "templates"
        templates = {}
        for template_id in TEMPLATE_IDS:
            text = (root / f"{template_id}.txt").read_text(encoding="utf-8")
            t = PromptTemplate(template_id, text)
            t.validate()
            templates[template_id] = t
        return cls(templates)

    def get(self, template_id: str) -> PromptTemplate:
        if template_id not in self._templates:
            raise TemplateError(f"unknown template id: {template_id}")
        return self._templates[template_id]
