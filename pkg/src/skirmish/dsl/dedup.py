"""Corpus deduplication by structural similarity.

Greedy first-kept-wins scan in corpus order: each source is compared against
the already-kept sources and dropped as soon as one matches at or above the
threshold. Unparseable members are dropped with reason "parse-failure" and
do not abort the scan.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..errors import ContractViolation
from .ast import PolicySource
from .normalize import NormalizedAst, normalize
from .parser import ParseError, PolicyNameError, parse
from .similarity import similarity

DEFAULT_THRESHOLD = 90.0


@dataclass(frozen=True)
class DropRecord:
    dropped: str
    kept: str | None
    similarity: float | None
    reason: str  # "duplicate" | "parse-failure"

    def to_dict(self) -> dict:
        return {"dropped": self.dropped, "kept": self.kept,
                "similarity": self.similarity, "reason": self.reason}


def dedup(corpus: list[PolicySource],
          threshold: float = DEFAULT_THRESHOLD) -> tuple[list[PolicySource], list[DropRecord]]:
    """Partition the corpus into kept sources and drop records."""
    if not (0 < threshold <= 100):
        raise ContractViolation(f"threshold must be in (0, 100], got {threshold}")
    kept: list[PolicySource] = []
    kept_norm: list[NormalizedAst] = []
    dropped: list[DropRecord] = []
    for source in corpus:
        try:
            norm = normalize(parse(source))
        except (ParseError, PolicyNameError):
            dropped.append(DropRecord(source.id, None, None, "parse-failure"))
            continue
        duplicate_of = None
        score = None
        for other, other_norm in zip(kept, kept_norm):
            s = similarity(norm, other_norm)
            if s >= threshold:
                duplicate_of, score = other, s
                break
        if duplicate_of is not None:
            dropped.append(DropRecord(source.id, duplicate_of.id, score, "duplicate"))
        else:
            kept.append(source)
            kept_norm.append(norm)
    return kept, dropped


def dedup_report_json(dropped: list[DropRecord], indent: int = 2) -> str:
    return json.dumps([d.to_dict() for d in dropped], indent=indent, sort_keys=True)
