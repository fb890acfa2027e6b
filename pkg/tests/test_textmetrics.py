from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from concept_forge.textmetrics import bleu, ngram_overlap, overlap_report, rouge_l

_sentences = st.lists(
    st.sampled_from(["red", "green", "blue", "cyan", "plum", "jade"]),
    min_size=1, max_size=12,
).map(" ".join)


# ---------------------------------------------------------------------------
# ngram_overlap

def test_identical_texts_full_overlap():
    text = "one two three four"
    for n in range(1, 5):
        assert ngram_overlap(text, text, n) == 100.0


def test_disjoint_texts_zero_overlap():
    assert ngram_overlap("aa bb cc", "dd ee ff", 1) == 0.0


def test_hand_counted_bigram_overlap():
    # input bigrams {ab, bc}; only bc present in output
    assert ngram_overlap("a b c", "b c d", 2) == 50.0


def test_short_input_is_undefined():
    assert ngram_overlap("a b", "a b", 3) is None
    assert ngram_overlap("", "anything", 1) is None


def test_overlap_rejects_bad_n():
    with pytest.raises(ValueError):
        ngram_overlap("a", "a", 0)


def test_overlap_is_type_based():
    # Repeated input bigram counts once.
    assert ngram_overlap("x y x y", "x y", 2) == pytest.approx(100 * 1 / 2)


def test_overlap_report_shape():
    report = overlap_report("a b c", "a b c")
    assert report == {1: 100.0, 2: 100.0, 3: 100.0, 4: None, 5: None}


@settings(max_examples=60)
@given(input_text=_sentences, output_text=_sentences,
       extra=st.sampled_from(["red", "green", "blue"]))
def test_growing_output_never_decreases_overlap(input_text, output_text, extra):
    for n in range(1, 4):
        before = ngram_overlap(input_text, output_text, n)
        after = ngram_overlap(input_text, output_text + " " + extra, n)
        if before is not None:
            assert after >= before


# ---------------------------------------------------------------------------
# bleu

def test_bleu_identity_is_100():
    assert bleu("the cat sat", ["the cat sat"]) == 100.0
    assert bleu("a", ["a"]) == 100.0


def test_bleu_disjoint_is_0():
    assert bleu("aa bb cc", ["dd ee ff"]) == 0.0


def test_bleu_hand_computed_case():
    # p1 = p2 = p3 = 1, empty 4-gram order; BP = exp(1 - 4/3)
    expected = 100.0 * math.exp(1.0 - 4.0 / 3.0)
    assert bleu("the cat sat", ["the cat sat down"]) == pytest.approx(expected, abs=1e-9)


def test_bleu_empty_candidate_is_0():
    assert bleu("", ["the cat"]) == 0.0


def test_bleu_requires_references():
    with pytest.raises(ValueError):
        bleu("anything", [])


def test_bleu_add_one_smoothing_on_zero_counts():
    # Shares unigrams but no bigram: p2 smoothed to 1/(total+1), not zero.
    score = bleu("the dog sat", ["sat the dog"])
    assert 0.0 < score < 100.0


def test_bleu_multiple_references_clip_to_best():
    assert bleu("the cat", ["a dog", "the cat"]) == 100.0


@settings(max_examples=60)
@given(_sentences)
def test_bleu_self_identity_property(text):
    assert bleu(text, [text]) == 100.0


# ---------------------------------------------------------------------------
# rouge_l

def test_rouge_identity():
    assert rouge_l("a b c", "a b c") == 1.0


def test_rouge_disjoint():
    assert rouge_l("aa bb", "cc dd") == 0.0


def test_rouge_hand_computed_case():
    # LCS("a b c d", "a c d") = 3; P = 3/4, R = 1; beta = 1.2
    beta2 = 1.2 * 1.2
    expected = (1 + beta2) * 1.0 * 0.75 / (1.0 + beta2 * 0.75)
    assert rouge_l("a b c d", "a c d") == pytest.approx(expected, abs=1e-12)


def test_rouge_empty_sides():
    assert rouge_l("", "") == 0.0
    assert rouge_l("a", "") == 0.0
    assert rouge_l("", "a") == 0.0


def test_rouge_beta_is_configurable():
    # beta -> 0 weights precision only: F -> P
    assert rouge_l("a b c d", "a c d", beta=1e-9) == pytest.approx(0.75, abs=1e-6)


@settings(max_examples=60)
@given(_sentences)
def test_rouge_self_identity_property(text):
    assert rouge_l(text, text) == 1.0


@settings(max_examples=60)
@given(candidate=_sentences, reference=_sentences)
def test_metric_ranges(candidate, reference):
    assert 0.0 <= bleu(candidate, [reference]) <= 100.0
    assert 0.0 <= rouge_l(candidate, reference) <= 1.0
    for n in range(1, 6):
        value = ngram_overlap(candidate, reference, n)
        assert value is None or 0.0 <= value <= 100.0
