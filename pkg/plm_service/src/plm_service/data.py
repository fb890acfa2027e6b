"""Readers for the pipeline's JSONL interchange files.

These parse the documented schemas directly; nothing here imports the
pipeline package itself.

Sample lines:    {"c_u", "c_v", "t", "prompt", "label", "text"}
Quintuple lines: {"p_i", "p_j", "p", "c_u", "c_v", "sent_i", "sent_j", "idea", "seq"}
Corpus lines:    {"id", "year", "sentences", ...}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

LABELS = ("related", "unrelated")


class SchemaError(ValueError):
    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class LinkSampleRow:
    text: str
    label: str


@dataclass(frozen=True)
class QuintupleRow:
    seq: str
    idea: str


def _iter_jsonl(path: str | Path):
    with Path(path).open(encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield line_number, json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(path, line_number, f"invalid JSON: {exc.msg}") from exc


def read_samples(path: str | Path) -> list[LinkSampleRow]:
    rows = []
    for line_number, obj in _iter_jsonl(path):
        text = obj.get("text")
        label = obj.get("label")
        if not isinstance(text, str) or "[MASK]" not in text:
            raise SchemaError(path, line_number, "field 'text' must contain a [MASK] slot")
        if label not in LABELS:
            raise SchemaError(path, line_number, f"field 'label' must be one of {LABELS}")
        rows.append(LinkSampleRow(text=text, label=label))
    if not rows:
        raise SchemaError(path, 0, "no samples in file")
    return rows


def read_quintuples(path: str | Path) -> list[QuintupleRow]:
    rows = []
    for line_number, obj in _iter_jsonl(path):
        seq = obj.get("seq")
        idea = obj.get("idea")
        if not isinstance(seq, str) or not seq:
            raise SchemaError(path, line_number, "field 'seq' must be a non-empty string")
        if not isinstance(idea, str) or not idea:
            raise SchemaError(path, line_number, "field 'idea' must be a non-empty string")
        rows.append(QuintupleRow(seq=seq, idea=idea))
    if not rows:
        raise SchemaError(path, 0, "no quintuples in file")
    return rows


def read_corpus_sentences(path: str | Path, limit: int | None = None) -> list[str]:
    sentences = []
    for line_number, obj in _iter_jsonl(path):
        for sent in obj.get("sentences", []):
            if isinstance(sent, str) and sent.strip():
                sentences.append(sent)
                if limit is not None and len(sentences) >= limit:
                    return sentences
    if not sentences:
        raise SchemaError(path, 0, "no sentences in corpus file")
    return sentences
