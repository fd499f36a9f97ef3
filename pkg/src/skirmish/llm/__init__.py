"""Pluggable chat-completion backends and prompt-template rendering."""

from .backends import (
    BackendError,
    HttpBackend,
    RecordBackend,
    ReplayBackend,
    ReplayExhausted,
    ReplayMismatch,
    complete,
)
from .gateway import DEFAULT_MODEL, DEFAULT_TEMPERATURES, Gateway, LlmCall
from .templates import (
    PLACEHOLDERS,
    TEMPLATE_IDS,
    ChatMessage,
    ChatRequest,
    PromptTemplate,
    RenderError,
    TemplateError,
    TemplateSet,
    render_prompt,
    request_digest,
)
from .transcript import Transcript, TranscriptLoadError, TranscriptRecord, append_record, load_transcript

__all__ = [
    "BackendError", "ChatMessage", "ChatRequest", "DEFAULT_MODEL",
    "DEFAULT_TEMPERATURES", "Gateway", "HttpBackend", "LlmCall",
    "PLACEHOLDERS", "PromptTemplate", "RecordBackend", "RenderError",
    "ReplayBackend", "ReplayExhausted", "ReplayMismatch", "TEMPLATE_IDS",
    "TemplateError", "TemplateSet", "Transcript", "TranscriptLoadError",
    "TranscriptRecord", "append_record", "complete", "load_transcript",
    "render_prompt", "request_digest",
]
