"""Corpus ingestion, dictionary concept matching, and the paper/concept index.

Corpus files are JSONL, one paper per line:

    {"id": str, "year": int, "title": str, "sentences": [str],
     "references": [str], "citation_count": int, "section_labels": [str]}

``title``, ``references``, ``citation_count`` and ``section_labels`` are
optional. Vocabulary files are TSV: ``surface<TAB>concept_id``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import CorpusFormatError, VocabularyError
from .text import normalize_phrase, tokenize_with_spans

CORPUS_SCHEMA = "paper-v1"

# Split points: sentence punctuation + one space, next char uppercase or digit.
_SENTENCE_SPLIT_RE = re.compile(r"(?<=[.?!]) (?=[A-Z0-9])")

_YEAR_MIN, _YEAR_MAX = 1000, 2999


def split_sentences(text: str) -> list[str]:
    """Deterministic sentence split on ". ", "? ", "! " before an uppercase or digit."""
    return [part for part in _SENTENCE_SPLIT_RE.split(text) if part]


@dataclass(frozen=True)
class PaperRecord:
    id: str
    year: int
    title: str = ""
    sentences: tuple[str, ...] = ()
    references: tuple[str, ...] = ()
    citation_count: int = 0
    section_labels: tuple[str, ...] | None = None


@dataclass(frozen=True)
class ConceptMention:
    paper_id: str
    concept_id: str
    sentence_index: int
    start: int
    end: int


@dataclass(frozen=True)
class ConceptVocabulary:
    """Normalized surface form -> concept id, one surface per concept."""

    entries: Mapping[str, str]
    normalization_rule: str = "lower-strip-edge-punct-v1"
    _by_concept: Mapping[str, str] = field(default_factory=dict, repr=False)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "ConceptVocabulary":
        entries: dict[str, str] = {}
        by_concept: dict[str, str] = {}
        for surface, concept_id in pairs:
            norm = normalize_phrase(surface)
            if not norm:
                raise VocabularyError(f"surface {surface!r} normalizes to empty")
            if norm in entries:
                raise VocabularyError(f"duplicate surface {norm!r}")
            if concept_id in by_concept:
                raise VocabularyError(f"duplicate concept id {concept_id!r}")
            entries[norm] = concept_id
            by_concept[concept_id] = norm
        return cls(entries=entries, _by_concept=by_concept)

    @classmethod
    def from_surfaces(cls, surfaces: Iterable[str]) -> "ConceptVocabulary":
        """Vocabulary whose concept ids are the normalized surfaces themselves."""
        return cls.from_pairs((s, normalize_phrase(s)) for s in surfaces)

    def surface_of(self, concept_id: str) -> str:
        return self._by_concept[concept_id]

    def concept_ids(self) -> set[str]:
        return set(self._by_concept)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class CorpusStore:
    """Immutable collection of validated paper records."""

    papers: tuple[PaperRecord, ...]
    by_id: Mapping[str, PaperRecord] = field(repr=False, default_factory=dict)

    @classmethod
    def from_records(cls, records: Iterable[PaperRecord]) -> "CorpusStore":
        papers = tuple(records)
        by_id: dict[str, PaperRecord] = {}
        for rec in papers:
            if rec.id in by_id:
                raise CorpusFormatError(f"duplicate paper id {rec.id!r}")
            by_id[rec.id] = rec
        return cls(papers=papers, by_id=by_id)

    def __len__(self) -> int:
        return len(self.papers)

    def __iter__(self) -> Iterator[PaperRecord]:
        return iter(self.papers)

    def get(self, paper_id: str) -> PaperRecord:
        return self.by_id[paper_id]


def _record_from_obj(obj: dict, line_number: int, path: str) -> PaperRecord:
    def fail(msg: str):
        raise CorpusFormatError(msg, line_number=line_number, path=path)

    if not isinstance(obj, dict):
        fail("expected a JSON object")
    paper_id = obj.get("id")
    if not isinstance(paper_id, str) or not paper_id:
        fail("field 'id' must be a non-empty string")
    year = obj.get("year")
    if not isinstance(year, int) or isinstance(year, bool) or not _YEAR_MIN <= year <= _YEAR_MAX:
        fail(f"field 'year' must be an integer in [{_YEAR_MIN}, {_YEAR_MAX}]")
    title = obj.get("title", "")
    if not isinstance(title, str):
        fail("field 'title' must be a string")
    raw_sentences = obj.get("sentences", [])
    if not isinstance(raw_sentences, list) or not all(isinstance(s, str) for s in raw_sentences):
        fail("field 'sentences' must be a list of strings")
    references = obj.get("references", [])
    if not isinstance(references, list) or not all(isinstance(r, str) for r in references):
        fail("field 'references' must be a list of strings")
    if paper_id in references:
        fail(f"paper {paper_id!r} references itself")
    citation_count = obj.get("citation_count", 0)
    if not isinstance(citation_count, int) or isinstance(citation_count, bool) or citation_count < 0:
        fail("field 'citation_count' must be a non-negative integer")
    labels = obj.get("section_labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            fail("field 'section_labels' must be a list of strings")
        if len(labels) != len(raw_sentences):
            fail("'section_labels' must align one-to-one with 'sentences'")

    # Re-split each provided string; the source label covers every piece.
    sentences: list[str] = []
    out_labels: list[str] | None = [] if labels is not None else None
    for i, chunk in enumerate(raw_sentences):
        pieces = split_sentences(chunk)
        sentences.extend(pieces)
        if out_labels is not None:
            out_labels.extend([labels[i]] * len(pieces))

    deduped_refs: list[str] = []
    seen_refs: set[str] = set()
    for ref in references:
        if ref not in seen_refs:
            seen_refs.add(ref)
            deduped_refs.append(ref)

    return PaperRecord(
        id=paper_id,
        year=year,
        title=title,
        sentences=tuple(sentences),
        references=tuple(deduped_refs),
        citation_count=citation_count,
        section_labels=tuple(out_labels) if out_labels is not None else None,
    )


def load_corpus(path: str | Path, schema: str = CORPUS_SCHEMA) -> CorpusStore:
    """Load and validate a JSONL corpus file."""
    if schema != CORPUS_SCHEMA:
        raise CorpusFormatError(f"unknown corpus schema {schema!r}; expected {CORPUS_SCHEMA!r}")
    path = Path(path)
    records: list[PaperRecord] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"invalid JSON: {exc.msg}", line_number=line_number, path=str(path)) from exc
            rec = _record_from_obj(obj, line_number, str(path))
            if rec.id in seen:
                raise CorpusFormatError(f"duplicate paper id {rec.id!r}", line_number=line_number, path=str(path))
            seen.add(rec.id)
            records.append(rec)
    return CorpusStore.from_records(records)


def load_vocabulary(path: str | Path) -> ConceptVocabulary:
    """Load a ``surface<TAB>concept_id`` TSV vocabulary."""
    pairs: list[tuple[str, str]] = []
    with Path(path).open(encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise VocabularyError(f"{path}:line {line_number}: expected 'surface<TAB>concept_id'")
            surface, concept_id = line.split("\t", 1)
            if not concept_id.strip():
                raise VocabularyError(f"{path}:line {line_number}: empty concept id")
            pairs.append((surface, concept_id.strip()))
    return ConceptVocabulary.from_pairs(pairs)


def match_concepts(paper: PaperRecord, vocab: ConceptVocabulary) -> list[ConceptMention]:
    """Dictionary matching: case-insensitive, token-boundary, leftmost-longest.

    Within a sentence, once a surface is matched the scan resumes after it, so
    shorter surfaces overlapping the chosen match are suppressed.
    """
    if not vocab.entries:
        return []
    max_tokens = max(surface.count(" ") + 1 for surface in vocab.entries)
    mentions: list[ConceptMention] = []
    for sentence_index, sentence in enumerate(paper.sentences):
        tokens = tokenize_with_spans(sentence)
        i = 0
        n = len(tokens)
        while i < n:
            matched = 0
            for m in range(min(max_tokens, n - i), 0, -1):
                phrase = " ".join(tok for tok, _, _ in tokens[i : i + m])
                concept_id = vocab.entries.get(phrase)
                if concept_id is not None:
                    mentions.append(
                        ConceptMention(
                            paper_id=paper.id,
                            concept_id=concept_id,
                            sentence_index=sentence_index,
                            start=tokens[i][1],
                            end=tokens[i + m - 1][2],
                        )
                    )
                    matched = m
                    break
            i += matched if matched else 1
    return mentions


@dataclass(frozen=True)
class CorpusIndex:
    """Bidirectional paper/concept maps plus per-paper mention lists."""

    concept_to_papers: Mapping[str, tuple[str, ...]]
    paper_to_concepts: Mapping[str, tuple[str, ...]]
    mentions: Mapping[str, tuple[ConceptMention, ...]]

    def papers_with(self, concept_id: str) -> tuple[str, ...]:
        return self.concept_to_papers.get(concept_id, ())

    def concepts_of(self, paper_id: str) -> tuple[str, ...]:
        return self.paper_to_concepts.get(paper_id, ())

    def mentions_of(self, paper_id: str) -> tuple[ConceptMention, ...]:
        return self.mentions.get(paper_id, ())

    def mention_sentences(self, paper_id: str, concept_id: str) -> list[int]:
        """Sorted distinct sentence indices of ``paper_id`` mentioning ``concept_id``."""
        return sorted({m.sentence_index for m in self.mentions_of(paper_id) if m.concept_id == concept_id})


def build_index(corpus: CorpusStore, vocab: ConceptVocabulary) -> CorpusIndex:
    """Run the matcher over the corpus and build the transposed maps."""
    concept_to_papers: dict[str, list[str]] = {}
    paper_to_concepts: dict[str, list[str]] = {}
    mentions: dict[str, tuple[ConceptMention, ...]] = {}
    for paper in corpus:
        found = match_concepts(paper, vocab)
        if not found:
            continue
        mentions[paper.id] = tuple(found)
        concepts = sorted({m.concept_id for m in found})
        paper_to_concepts[paper.id] = concepts
        for c in concepts:
            concept_to_papers.setdefault(c, []).append(paper.id)
    return CorpusIndex(
        concept_to_papers={c: tuple(sorted(ps)) for c, ps in sorted(concept_to_papers.items())},
        paper_to_concepts={p: tuple(cs) for p, cs in sorted(paper_to_concepts.items())},
        mentions=mentions,
    )
