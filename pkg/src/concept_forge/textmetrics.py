"""Text-side metrics for generated ideas: n-gram overlap, BLEU, ROUGE-L.

Tokenization everywhere: lowercase, whitespace split, edge punctuation
stripped (see :mod:`concept_forge.text`). Overlap is type-based: distinct
input n-grams are checked for presence among the output's n-grams.
"""

from __future__ import annotations

import math
from collections import Counter

from .text import tokenize

BLEU_MAX_ORDER = 4
ROUGE_BETA = 1.2


def _ngrams(tokens: list[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def ngram_overlap(input_text: str, output_text: str, n: int) -> float | None:
    """Percentage of distinct input n-grams that appear in the output.

    Undefined (None) when the input has no n-gram of this order.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    input_grams = set(_ngrams(tokenize(input_text), n))
    if not input_grams:
        return None
    output_grams = set(_ngrams(tokenize(output_text), n))
    return 100.0 * len(input_grams & output_grams) / len(input_grams)


def overlap_report(input_text: str, output_text: str, max_n: int = 5) -> dict[int, float | None]:
    return {n: ngram_overlap(input_text, output_text, n) for n in range(1, max_n + 1)}


def bleu(candidate: str, references: list[str]) -> float:
    """BLEU-4 on the 0..100 scale: uniform weights, brevity penalty, add-one
    smoothing on zero counts for orders >= 2. No unigram match at all gives 0.

    The effective reference length is the one closest to the candidate
    length, shorter on ties.
    """
    if not references:
        raise ValueError("references must be non-empty")
    cand = tokenize(candidate)
    if not cand:
        return 0.0
    refs = [tokenize(r) for r in references]

    log_sum = 0.0
    for n in range(1, BLEU_MAX_ORDER + 1):
        cand_counts = Counter(_ngrams(cand, n))
        total = sum(cand_counts.values())
        if total == 0:
            # No n-grams of this order; add-one smoothing degenerates to 1.
            continue
        max_ref: Counter = Counter()
        for ref in refs:
            for gram, count in Counter(_ngrams(ref, n)).items():
                if count > max_ref[gram]:
                    max_ref[gram] = count
        clipped = sum(min(count, max_ref[gram]) for gram, count in cand_counts.items())
        if clipped == 0:
            if n == 1:
                return 0.0
            p_n = 1.0 / (total + 1)
        else:
            p_n = clipped / total
        log_sum += math.log(p_n) / BLEU_MAX_ORDER

    c = len(cand)
    r = min((len(ref) for ref in refs), key=lambda length: (abs(length - c), length))
    bp = 1.0 if c > r else math.exp(1.0 - r / c)
    return 100.0 * bp * math.exp(log_sum)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str, beta: float = ROUGE_BETA) -> float:
    """LCS F-measure with recall weighted by beta; 0 when either side is empty."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    denom = recall + beta * beta * precision
    if denom == 0:
        return 0.0
    return (1 + beta * beta) * recall * precision / denom


def analysis_report(input_text: str, output_text: str, references: list[str],
                    max_n: int = 5) -> dict:
    """Combined report: overlap of input vs output, BLEU/ROUGE-L of output vs references."""
    return {
        "overlap": {str(n): v for n, v in overlap_report(input_text, output_text, max_n).items()},
        "bleu": bleu(output_text, references),
        "rouge_l": rouge_l(output_text, references[0]) if references else 0.0,
    }
