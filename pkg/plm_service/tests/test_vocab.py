from __future__ import annotations

import pytest

from plm_service.vocab import WordVocab, sentinel, tokenize


def test_tokenize_preserves_markers():
    text = "[CLS] Unknown: in 2015, graph neural network is [MASK] to convolution.[SEP]"
    assert tokenize(text) == ["[CLS]", "unknown", "in", "2015", "graph", "neural",
                              "network", "is", "[MASK]", "to", "convolution", "[SEP]"]


def test_tokenize_seq_markers():
    text = "<HEAD> a b <TAIL> c <SEP> First sentence. <SEP> x 42"
    assert tokenize(text) == ["<HEAD>", "a", "b", "<TAIL>", "c", "<SEP>",
                              "first", "sentence", "<SEP>", "x", "42"]


def test_tokenize_keeps_hyphenated_words():
    assert tokenize("covid-19 spike") == ["covid-19", "spike"]


def test_label_words_are_single_tokens():
    vocab = WordVocab.build(["some text"], extra_words=("related", "unrelated"))
    assert vocab.single_token_id("related") != vocab.single_token_id("unrelated")
    with pytest.raises(ValueError, match="not in the vocabulary"):
        vocab.single_token_id("absent")
    with pytest.raises(ValueError, match="single entry"):
        vocab.single_token_id("two words")


def test_special_tokens_present():
    vocab = WordVocab.build(["hello"], extra_words=("<HEAD>", "<TAIL>", "<SEP>"))
    for marker in ("[PAD]", "[MASK]", "</s>", "<HEAD>", "<TAIL>", "<SEP>", sentinel(0)):
        assert marker in vocab.token_to_id


def test_encode_decode_round_trip_on_plain_words():
    vocab = WordVocab.build(["alpha beta gamma"])
    ids = vocab.encode("alpha beta gamma")
    assert vocab.decode(ids) == "alpha beta gamma"


def test_unknown_words_map_to_unk():
    vocab = WordVocab.build(["alpha"])
    assert vocab.encode("omega") == [vocab.unk_id]


def test_save_load_round_trip(tmp_path):
    vocab = WordVocab.build(["alpha beta"], extra_words=("related",))
    vocab.save(tmp_path / "vocab.json")
    loaded = WordVocab.load(tmp_path / "vocab.json")
    assert loaded.tokens == vocab.tokens
    assert loaded.encode("alpha beta") == vocab.encode("alpha beta")
