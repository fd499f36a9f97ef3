"""Extraction of policy code from LLM response text.

Responses either wrap the policy in a fenced code block (any info string,
``python`` included) or follow the tagged layout::

    <strategy> ...prose... </strategy>
    <code>
    ```python
    policy "..." { ... }
    ```
    </code>

When a <code> tag is present its fenced block wins; otherwise the first
fenced block anywhere in the response is used.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .ast import PolicySource

_FENCE_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_CODE_TAG_RE = re.compile(r"<code>(.*?)</code>", re.DOTALL | re.IGNORECASE)
_STRATEGY_RE = re.compile(r"<strategy>(.*?)</strategy>", re.DOTALL | re.IGNORECASE)


class ExtractError(Exception):
    """No policy code block could be extracted from a response."""


@dataclass(frozen=True)
class ExtractResult:
    source: PolicySource
    strategy: str | None  # surrounding <strategy> prose, when present


def _first_fence(text: str) -> str | None:
    m = _FENCE_RE.search(text)
    return m.group(1) if m else None


def extract_code_block(response: str, source_id: str | None = None,
                       origin: str = "llm") -> ExtractResult:
    """Pull the policy source out of a response; ExtractError when absent."""
    strategy = None
    sm = _STRATEGY_RE.search(response)
    if sm:
        strategy = sm.group(1).strip()
    code = None
    cm = _CODE_TAG_RE.search(response)
    if cm:
        code = _first_fence(cm.group(1))
    if code is None:
        code = _first_fence(response)
    if code is None or not code.strip():
        raise ExtractError("no fenced code block in response")
    code = code.strip() + "\n"
    if source_id is None:
        source_id = "src-" + hashlib.sha256(code.encode("utf-8")).hexdigest()[:12]
    return ExtractResult(PolicySource(id=source_id, text=code, origin=origin), strategy)
