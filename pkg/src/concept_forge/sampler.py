"""Temporal link-prediction sample generation and serialization.

Positive samples cover every (edge, year) the graph contains. Negative
samples pair a concept with k-hop neighbors that are still unconnected
d years later; because edges never disappear, those pairs were also
unconnected at every earlier year, which forces the "Unknown" prompt.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import CorpusFormatError, UnknownConceptError
from .graph import ConceptPair, EvolvingGraph, k_hop_neighborhood


class PromptWord(str, Enum):
    EXISTING = "Existing"
    UNKNOWN = "Unknown"


class Label(str, Enum):
    RELATED = "related"
    UNRELATED = "unrelated"


_SAMPLE_RE = re.compile(
    r"\A\[CLS\] (Existing|Unknown): in (\d+), (.+?) is \[MASK\] to (.+)\.\[SEP\]\Z"
)


@dataclass(frozen=True)
class LinkSample:
    c_u: str
    c_v: str
    t: int
    prompt: PromptWord
    label: Label
    text: str

    def __post_init__(self):
        if self.label is Label.UNRELATED and self.prompt is not PromptWord.UNKNOWN:
            raise ValueError("unrelated samples must carry the Unknown prompt")


@dataclass(frozen=True)
class SamplerConfig:
    k: int = 2
    d: int = 5
    max_negatives_per_anchor: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.max_negatives_per_anchor is not None and self.max_negatives_per_anchor < 0:
            raise ValueError("max_negatives_per_anchor must be non-negative")


def prompt_of(g: EvolvingGraph, u: str, v: str, t: int) -> PromptWord:
    """"Existing" when the pair was already connected at t-1, else "Unknown".

    The year before the first snapshot is treated as edgeless, so every
    prompt at t_start is "Unknown".
    """
    pair = ConceptPair.of(u, v)
    g.edges(t)  # validates year; raises YearRangeError outside the range
    if pair.lo not in g.concepts or pair.hi not in g.concepts:
        raise UnknownConceptError(f"unknown concept in pair {pair}")
    if t == g.t_start:
        return PromptWord.UNKNOWN
    return PromptWord.EXISTING if pair in g.edges(t - 1) else PromptWord.UNKNOWN


def serialize_sample(c_u: str, c_v: str, t: int, prompt: PromptWord) -> str:
    """Exact prompt sequence; whitespace and punctuation are load-bearing."""
    return f"[CLS] {prompt.value}: in {t}, {c_u} is [MASK] to {c_v}.[SEP]"


def parse_sample(text: str) -> tuple[str, str, int, PromptWord]:
    """Invert :func:`serialize_sample`. Concept surfaces must not embed the template markers."""
    m = _SAMPLE_RE.match(text)
    if m is None:
        raise ValueError(f"text does not match the sample template: {text!r}")
    prompt, year, c_u, c_v = m.groups()
    return c_u, c_v, int(year), PromptWord(prompt)


def make_sample(c_u: str, c_v: str, t: int, prompt: PromptWord, label: Label) -> LinkSample:
    return LinkSample(c_u=c_u, c_v=c_v, t=t, prompt=prompt, label=label,
                      text=serialize_sample(c_u, c_v, t, prompt))


def _sorted_samples(samples: list[LinkSample]) -> list[LinkSample]:
    return sorted(samples, key=lambda s: (s.t, s.c_u, s.c_v, s.label.value))


def generate_positives(g: EvolvingGraph) -> list[LinkSample]:
    """One related sample per (edge, year) with the edge present, canonical pair order."""
    samples = []
    for t in g.years():
        for pair in g.edges(t):
            samples.append(make_sample(pair.lo, pair.hi, t, prompt_of(g, pair.lo, pair.hi, t),
                                        Label.RELATED))
    return _sorted_samples(samples)


def _anchor_rng(seed: int, anchor: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{anchor}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def generate_negatives(g: EvolvingGraph, cfg: SamplerConfig) -> list[LinkSample]:
    """Unrelated samples: v in N_k(u) at t, still unconnected at t+d.

    No samples are generated in the last d years, and results are
    deduplicated on the canonical (pair, t). For downsampling, each pair
    counts toward its lo endpoint as anchor; groups above the cap are
    thinned with an RNG derived from (seed, anchor), so the outcome is
    independent of iteration order.
    """
    candidates: set[tuple[ConceptPair, int]] = set()
    last_t = g.t_end - cfg.d
    for anchor in sorted(g.concepts):
        for t in range(g.t_start, last_t + 1):
            for v in k_hop_neighborhood(g, t, anchor, cfg.k):
                pair = ConceptPair.of(anchor, v)
                if pair not in g.edges(t + cfg.d):
                    candidates.add((pair, t))
    if cfg.max_negatives_per_anchor is not None:
        by_anchor: dict[str, list[tuple[ConceptPair, int]]] = {}
        for pair, t in sorted(candidates):
            by_anchor.setdefault(pair.lo, []).append((pair, t))
        chosen: set[tuple[ConceptPair, int]] = set()
        for anchor, group in by_anchor.items():
            if len(group) > cfg.max_negatives_per_anchor:
                rng = _anchor_rng(cfg.seed, anchor)
                group = rng.sample(group, cfg.max_negatives_per_anchor)
            chosen.update(group)
        candidates = chosen
    # Monotone growth makes A_{t-1}=0 certain here, hence the fixed Unknown prompt.
    samples = [make_sample(pair.lo, pair.hi, t, PromptWord.UNKNOWN, Label.UNRELATED)
               for pair, t in candidates]
    return _sorted_samples(samples)


def samples_to_jsonl(samples: list[LinkSample]) -> str:
    """JSONL serialization ordered by (t, pair)."""
    lines = []
    for s in _sorted_samples(samples):
        lines.append(json.dumps({
            "c_u": s.c_u,
            "c_v": s.c_v,
            "t": s.t,
            "prompt": s.prompt.value,
            "label": s.label.value,
            "text": s.text,
        }))
    return "".join(line + "\n" for line in lines)


def export_samples(samples: list[LinkSample], path: str | Path) -> None:
    Path(path).write_text(samples_to_jsonl(samples), encoding="utf-8")


def load_samples(path: str | Path) -> list[LinkSample]:
    samples = []
    with Path(path).open(encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                sample = LinkSample(
                    c_u=obj["c_u"], c_v=obj["c_v"], t=obj["t"],
                    prompt=PromptWord(obj["prompt"]), label=Label(obj["label"]),
                    text=obj["text"],
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise CorpusFormatError(f"invalid sample: {exc}", line_number=line_number,
                                        path=str(path)) from exc
            if sample.text != serialize_sample(sample.c_u, sample.c_v, sample.t, sample.prompt):
                raise CorpusFormatError("sample text does not match its fields",
                                        line_number=line_number, path=str(path))
            samples.append(sample)
    return samples
