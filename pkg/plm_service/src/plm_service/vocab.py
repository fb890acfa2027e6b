"""Word-level vocabulary shared by the masked-LM scorer and the verbalizer.

Input texts carry literal markers ([CLS], [MASK], <HEAD>, ...) that must
stay intact as single tokens; everything else is lowercased and split into
alphanumeric word tokens. Label words are forced into the vocabulary so
each one is exactly one token.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable

PAD, UNK, CLS, SEP, MASK, EOS = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "</s>"
HEAD_MARK, TAIL_MARK, SEP_MARK = "<HEAD>", "<TAIL>", "<SEP>"

BASE_SPECIALS = (PAD, UNK, CLS, SEP, MASK, EOS, HEAD_MARK, TAIL_MARK, SEP_MARK)

_MARKER_RE = re.compile(r"\[CLS\]|\[SEP\]|\[MASK\]|<HEAD>|<TAIL>|<SEP>|<extra_id_\d+>")
_WORD_RE = re.compile(r"[a-z0-9]+(?:[-'][a-z0-9]+)*")


def sentinel(i: int) -> str:
    return f"<extra_id_{i}>"


def tokenize(text: str) -> list[str]:
    """Markers verbatim, words lowercased; punctuation dropped."""
    tokens: list[str] = []
    pos = 0
    for m in _MARKER_RE.finditer(text):
        tokens.extend(_WORD_RE.findall(text[pos:m.start()].lower()))
        tokens.append(m.group())
        pos = m.end()
    tokens.extend(_WORD_RE.findall(text[pos:].lower()))
    return tokens


class WordVocab:
    def __init__(self, tokens: list[str]):
        self.tokens = list(tokens)
        self.token_to_id = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self.token_to_id) != len(self.tokens):
            raise ValueError("duplicate tokens in vocabulary")

    @classmethod
    def build(cls, texts: Iterable[str], extra_words: Iterable[str] = (),
              n_sentinels: int = 32) -> "WordVocab":
        seen: dict[str, None] = {}
        for text in texts:
            for tok in tokenize(text):
                seen.setdefault(tok, None)
        for word in extra_words:
            for tok in tokenize(word):
                seen.setdefault(tok, None)
        tokens = list(BASE_SPECIALS)
        tokens.extend(sentinel(i) for i in range(n_sentinels))
        tokens.extend(tok for tok in seen if tok not in set(tokens))
        return cls(tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return self.token_to_id[PAD]

    @property
    def unk_id(self) -> int:
        return self.token_to_id[UNK]

    @property
    def mask_id(self) -> int:
        return self.token_to_id[MASK]

    @property
    def eos_id(self) -> int:
        return self.token_to_id[EOS]

    def id_of(self, token: str) -> int:
        return self.token_to_id.get(token, self.unk_id)

    def single_token_id(self, word: str) -> int:
        """Id of a word that must map to exactly one vocabulary entry."""
        pieces = tokenize(word)
        if len(pieces) != 1:
            raise ValueError(f"{word!r} does not tokenize to a single entry: {pieces}")
        token_id = self.id_of(pieces[0])
        if token_id == self.unk_id:
            raise ValueError(f"{word!r} is not in the vocabulary")
        return token_id

    def encode(self, text: str, max_len: int | None = None) -> list[int]:
        ids = [self.id_of(tok) for tok in tokenize(text)]
        if max_len is not None:
            ids = ids[:max_len]
        return ids

    def decode(self, ids: Iterable[int], skip_special: bool = True) -> str:
        specials = set(BASE_SPECIALS) | {sentinel(i) for i in range(64)}
        words = []
        for i in ids:
            if 0 <= int(i) < len(self.tokens):
                tok = self.tokens[int(i)]
                if skip_special and tok in specials:
                    continue
                words.append(tok)
        return " ".join(words)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps({"tokens": self.tokens}, indent=2) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "WordVocab":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(payload["tokens"])
