"""Co-occurrence citation quintuples: extraction, evidence binding, filtering,
serialization, and dataset splitting.

A quintuple (p_i, p_j, c_u, c_v, p) records that target paper p cites both
p_i and p_j, shares concept c_u with p_i and concept c_v with p_j. Evidence
sentences are bound afterwards: one sentence of p_i mentioning c_u, one of
p_j mentioning c_v, and idea text from p itself.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import CorpusIndex, CorpusStore
from .errors import CorpusFormatError, UnboundQuintupleError
from .text import tokenize

logger = logging.getLogger(__name__)

IDEA_SECTIONS = ("abstract", "introduction")

DEFAULT_KEYWORD_BLOCKLIST = ("thank", "thanks", "acknowledge", "funded", "funding", "grant")
DEFAULT_SECTION_BLOCKLIST = ("acknowledgments", "experimental details")


@dataclass(frozen=True)
class Quintuple:
    p_i: str
    p_j: str
    c_u: str
    c_v: str
    p: str
    sent_i: str | None = None
    sent_j: str | None = None
    sent_i_section: str | None = None
    sent_j_section: str | None = None
    idea_sentences: tuple[str, ...] = ()

    @property
    def key(self) -> tuple[str, str, str, str, str]:
        return (self.p_i, self.p_j, self.c_u, self.c_v, self.p)

    @property
    def bound(self) -> bool:
        return self.sent_i is not None and self.sent_j is not None

    @property
    def idea(self) -> str:
        return " ".join(self.idea_sentences)


@dataclass(frozen=True)
class FilterRuleSet:
    """Heuristic sentence filters; the zero-argument constructor is a no-op set."""

    keyword_blocklist: tuple[str, ...] = ()
    section_blocklist: tuple[str, ...] = ()
    numeric_density_threshold: float = 1.0
    min_tokens: int = 0
    max_tokens: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.numeric_density_threshold <= 1.0:
            raise ValueError("numeric_density_threshold must be within [0, 1]")

    @classmethod
    def default(cls) -> "FilterRuleSet":
        return cls(
            keyword_blocklist=DEFAULT_KEYWORD_BLOCKLIST,
            section_blocklist=DEFAULT_SECTION_BLOCKLIST,
            numeric_density_threshold=0.2,
            min_tokens=5,
            max_tokens=120,
        )


@dataclass(frozen=True)
class QuintupleDataset:
    train: tuple[Quintuple, ...]
    valid: tuple[Quintuple, ...]
    test: tuple[Quintuple, ...]
    seed: int = 0


def extract_quintuples(index: CorpusIndex, corpus: CorpusStore,
                       citation_threshold: int = 2) -> list[Quintuple]:
    """All (p_i, p_j, c_u, c_v, p) satisfying the membership conditions.

    Targets need citation_count >= citation_threshold. Both orientations are
    kept when derivable (literal set semantics over ordered tuples); the
    result is deduplicated on the full 5-tuple and canonically sorted.
    Dangling references are skipped and reported through the module logger.
    """
    found: set[tuple[str, str, str, str, str]] = set()
    dangling = 0
    for target in corpus:
        if target.citation_count < citation_threshold:
            continue
        refs = []
        for ref_id in target.references:
            if ref_id in corpus.by_id:
                refs.append(ref_id)
            else:
                dangling += 1
        if len(refs) < 2:
            continue
        target_concepts = set(index.concepts_of(target.id))
        if not target_concepts:
            continue
        shared = {r: target_concepts.intersection(index.concepts_of(r)) for r in refs}
        for p_i in refs:
            if not shared[p_i]:
                continue
            for p_j in refs:
                if p_i == p_j or not shared[p_j]:
                    continue
                for c_u in shared[p_i]:
                    for c_v in shared[p_j]:
                        if c_u != c_v:
                            found.add((p_i, p_j, c_u, c_v, target.id))
    if dangling:
        logger.info("skipped %d dangling reference(s) during quintuple extraction", dangling)
    return [Quintuple(p_i=a, p_j=b, c_u=u, c_v=v, p=p) for a, b, u, v, p in sorted(found)]


def _side_rng(seed: int, paper_id: str, concept_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{paper_id}:{concept_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _pick_sentence(index: CorpusIndex, corpus: CorpusStore, paper_id: str,
                   concept_id: str, seed: int) -> tuple[str, str | None] | None:
    candidates = index.mention_sentences(paper_id, concept_id)
    if not candidates:
        return None
    rng = _side_rng(seed, paper_id, concept_id)
    idx = candidates[rng.randrange(len(candidates))]
    paper = corpus.get(paper_id)
    section = paper.section_labels[idx] if paper.section_labels else None
    return paper.sentences[idx], section


def _idea_sentences(index: CorpusIndex, corpus: CorpusStore, q: Quintuple) -> tuple[str, ...]:
    """Idea text from the target paper: abstract/introduction sentences that
    mention both concepts, else either; without labels, the earliest sentence
    mentioning either concept."""
    paper = corpus.get(q.p)
    sent_u = set(index.mention_sentences(q.p, q.c_u))
    sent_v = set(index.mention_sentences(q.p, q.c_v))
    if paper.section_labels:
        pool = [i for i, lab in enumerate(paper.section_labels) if lab.lower() in IDEA_SECTIONS]
        both = [i for i in pool if i in sent_u and i in sent_v]
        either = both or [i for i in pool if i in sent_u or i in sent_v]
        if either:
            return tuple(paper.sentences[i] for i in either)
    any_mention = sorted(sent_u | sent_v)
    if any_mention:
        return (paper.sentences[any_mention[0]],)
    return ()


def bind_sentences(q: Quintuple, index: CorpusIndex, corpus: CorpusStore,
                   seed: int) -> Quintuple | None:
    """Bind evidence and idea sentences; None when a side has no candidate.

    Sentence choice is uniform under an RNG derived from (seed, paper,
    concept), so bindings are reproducible and independent of call order.
    """
    side_i = _pick_sentence(index, corpus, q.p_i, q.c_u, seed)
    side_j = _pick_sentence(index, corpus, q.p_j, q.c_v, seed)
    if side_i is None or side_j is None:
        return None
    idea = _idea_sentences(index, corpus, q)
    if not idea:
        return None
    return replace(q, sent_i=side_i[0], sent_i_section=side_i[1],
                   sent_j=side_j[0], sent_j_section=side_j[1],
                   idea_sentences=idea)


def bind_all(qs: list[Quintuple], index: CorpusIndex, corpus: CorpusStore,
             seed: int) -> tuple[list[Quintuple], int]:
    """Bind every quintuple; returns (bound, dropped_count)."""
    bound = []
    dropped = 0
    for q in qs:
        b = bind_sentences(q, index, corpus, seed)
        if b is None:
            dropped += 1
        else:
            bound.append(b)
    return bound, dropped


def _numeric_density(tokens: list[str]) -> float:
    if not tokens:
        return 0.0
    numeric = sum(1 for t in tokens if any(ch.isdigit() for ch in t) and not any(ch.isalpha() for ch in t))
    return numeric / len(tokens)


def _sentence_passes(sentence: str, section: str | None, rules: FilterRuleSet) -> bool:
    if section is not None and section.lower() in {s.lower() for s in rules.section_blocklist}:
        return False
    tokens = tokenize(sentence)
    if any(t in rules.keyword_blocklist for t in tokens):
        return False
    if _numeric_density(tokens) > rules.numeric_density_threshold:
        return False
    count = len(sentence.split())
    if count < rules.min_tokens:
        return False
    if rules.max_tokens is not None and count > rules.max_tokens:
        return False
    return True


def filter_quintuples(qs: list[Quintuple], rules: FilterRuleSet | None = None) -> list[Quintuple]:
    """Drop quintuples whose bound evidence sentences hit any rule."""
    if rules is None:
        rules = FilterRuleSet.default()
    kept = []
    for q in qs:
        if not q.bound:
            raise UnboundQuintupleError(f"cannot filter unbound quintuple {q.key}")
        if (_sentence_passes(q.sent_i, q.sent_i_section, rules)
                and _sentence_passes(q.sent_j, q.sent_j_section, rules)):
            kept.append(q)
    return kept


def serialize_seq(q: Quintuple) -> str:
    """Exact verbalizer input template; single spaces around the markers."""
    if not q.bound:
        raise UnboundQuintupleError(f"quintuple {q.key} has no bound sentences")
    return f"<HEAD> {q.c_u} <TAIL> {q.c_v} <SEP> {q.sent_i} <SEP> {q.sent_j}"


def parse_seq(text: str) -> tuple[str, str, str, str]:
    """Recover (c_u, c_v, sent_i, sent_j); valid when no field embeds a marker."""
    if not text.startswith("<HEAD> "):
        raise ValueError("sequence does not start with <HEAD>")
    rest = text[len("<HEAD> "):]
    c_u, sep, rest = rest.partition(" <TAIL> ")
    if not sep:
        raise ValueError("missing <TAIL> marker")
    c_v, sep, rest = rest.partition(" <SEP> ")
    if not sep:
        raise ValueError("missing first <SEP> marker")
    sent_i, sep, sent_j = rest.partition(" <SEP> ")
    if not sep:
        raise ValueError("missing second <SEP> marker")
    return c_u, c_v, sent_i, sent_j


def split_dataset(qs: list[Quintuple], ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
                  seed: int = 0) -> QuintupleDataset:
    """Seeded shuffle then contiguous split; cut points floor the cumulative ratios."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be three positive numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    items = list(qs)
    random.Random(seed).shuffle(items)
    n = len(items)
    cut1 = int(n * ratios[0] + 1e-9)
    cut2 = int(n * (ratios[0] + ratios[1]) + 1e-9)
    return QuintupleDataset(train=tuple(items[:cut1]), valid=tuple(items[cut1:cut2]),
                            test=tuple(items[cut2:]), seed=seed)


def quintuple_to_payload(q: Quintuple) -> dict:
    return {
        "p_i": q.p_i,
        "p_j": q.p_j,
        "p": q.p,
        "c_u": q.c_u,
        "c_v": q.c_v,
        "sent_i": q.sent_i,
        "sent_j": q.sent_j,
        "idea": q.idea,
        "seq": serialize_seq(q),
    }


def export_quintuples(qs: list[Quintuple], path: str | Path) -> None:
    lines = [json.dumps(quintuple_to_payload(q)) for q in qs]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_quintuples(path: str | Path) -> list[Quintuple]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                q = Quintuple(p_i=obj["p_i"], p_j=obj["p_j"], p=obj["p"],
                              c_u=obj["c_u"], c_v=obj["c_v"],
                              sent_i=obj["sent_i"], sent_j=obj["sent_j"],
                              idea_sentences=(obj["idea"],) if obj["idea"] else ())
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorpusFormatError(f"invalid quintuple: {exc}", line_number=line_number,
                                        path=str(path)) from exc
            out.append(q)
    return out


def write_split_manifest(ds: QuintupleDataset, path: str | Path) -> None:
    payload = {
        "seed": ds.seed,
        "train": [list(q.key) for q in ds.train],
        "valid": [list(q.key) for q in ds.valid],
        "test": [list(q.key) for q in ds.test],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
