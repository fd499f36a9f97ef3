"""Transcript files: JSON Lines of {digest, response}, one record per call."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field


class TranscriptLoadError(Exception):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"{message} (line {line_no})")
        self.message = message
        self.line_no = line_no


@dataclass(frozen=True)
class TranscriptRecord:
    digest: str
    response: str


@dataclass
class Transcript:
    records: list[TranscriptRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)


def load_transcript(path) -> Transcript:
    """Read a transcript file; TranscriptLoadError names the offending line."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise TranscriptLoadError(f"malformed record: {e.msg}", line_no) from e
            if (not isinstance(doc, dict) or not isinstance(doc.get("digest"), str)
                    or not isinstance(doc.get("response"), str)):
                raise TranscriptLoadError(
                    "record must be an object with string 'digest' and 'response'",
                    line_no)
            records.append(TranscriptRecord(doc["digest"], doc["response"]))
    return Transcript(records)


def append_record(path, record: TranscriptRecord) -> None:
    """Append one record; the single write + flush keeps records whole."""
    line = json.dumps({"digest": record.digest, "response": record.response},
                      ensure_ascii=False, sort_keys=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())
