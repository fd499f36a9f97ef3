"""Chat-completion backends: live HTTP, record, and replay.

All three expose ``complete(request) -> str``. The HTTP backend speaks the
OpenAI-compatible shape (POST {base}/v1/chat/completions) with bounded
retries. Record wraps another backend and appends {digest, response} to a
transcript per call; replay serves a transcript strictly in order and checks
each stored digest against the incoming request.
"""

from __future__ import annotations

import logging
import os
import threading
import time

import requests

from .templates import ChatRequest, request_digest
from .transcript import Transcript, TranscriptRecord, append_record, load_transcript

log = logging.getLogger(__name__)

DEFAULT_MAX_RETRIES = 3
DEFAULT_BACKOFF_SECONDS = 1.0


class BackendError(Exception):
    """The backend could not produce a response."""


class ReplayExhausted(BackendError):
    """Replay was asked for more responses than the transcript holds."""


class ReplayMismatch(BackendError):
    """A replayed request does not match the recorded one (strict mode)."""


class HttpBackend:
    """One OpenAI-compatible endpoint; bearer token from LLM_API_KEY."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 max_retries: int = DEFAULT_MAX_RETRIES,
                 backoff_seconds: float = DEFAULT_BACKOFF_SECONDS,
                 timeout: float = 120.0, max_concurrency: int = 4):
        self.base_url = (base_url or os.environ.get("LLM_BASE_URL", "")).rstrip("/")
        if not self.base_url:
            raise BackendError("no base URL configured (set LLM_BASE_URL)")
        self.api_key = api_key if api_key is not None else os.environ.get("LLM_API_KEY", "")
        self.max_retries = max_retries
        self.backoff_seconds = backoff_seconds
        self.timeout = timeout
        self._gate = threading.Semaphore(max_concurrency)

    def complete(self, request: ChatRequest) -> str:
        request.validate()
        url = f"{self.base_url}/v1/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": request.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            if attempt:
                time.sleep(self.backoff_seconds * (2 ** (attempt - 1)))
            try:
                with self._gate:
                    resp = requests.post(url, json=body, headers=headers,
                                         timeout=self.timeout)
                resp.raise_for_status()
                payload = resp.json()
                return payload["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as e:
                last_error = e
                log.warning("chat completion attempt %d failed: %s", attempt + 1, e)
        raise BackendError(f"chat completion failed after "
                           f"{self.max_retries} attempts: {last_error}") from last_error


class RecordBackend:
    """Forward to an inner backend and append each exchange to a transcript."""

    def __init__(self, inner, path, fresh: bool = False):
        self.inner = inner
        self.path = path
        if fresh:
            open(path, "w", encoding="utf-8").close()

    def complete(self, request: ChatRequest) -> str:
        request.validate()
        response = self.inner.complete(request)
        append_record(self.path, TranscriptRecord(request_digest(request.messages), response))
        return response


class ReplayBackend:
    """Serve a recorded transcript strictly in order."""

    def __init__(self, transcript: Transcript | str, strict: bool = True):
        if not isinstance(transcript, Transcript):
            transcript = load_transcript(transcript)
        self.transcript = transcript
        self.strict = strict
        self._cursor = 0
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> str:
        request.validate()
        with self._lock:
            if self._cursor >= len(self.transcript.records):
                raise ReplayExhausted(
                    f"transcript exhausted after {self._cursor} responses")
            record = self.transcript.records[self._cursor]
            self._cursor += 1
        digest = request_digest(request.messages)
        if digest != record.digest:
            message = (f"request digest {digest[:12]}... does not match recorded "
                       f"{record.digest[:12]}... at position {self._cursor - 1}")
            if self.strict:
                raise ReplayMismatch(message)
            log.warning("replay mismatch tolerated: %s", message)
        return record.response


def complete(backend, request: ChatRequest) -> str:
    """Run one chat completion against any configured backend."""
    request.validate()
    return backend.complete(request)
