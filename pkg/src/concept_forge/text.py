"""Shared tokenization and normalization.

One rule used everywhere a surface form is compared or counted: lowercase,
split on whitespace, strip punctuation from token edges (internal hyphens
etc. survive), drop tokens that are punctuation-only.
"""

from __future__ import annotations

import re
import string

_EDGE_PUNCT = string.punctuation
_TOKEN_RE = re.compile(r"\S+")


def normalize_token(token: str) -> str:
    return token.lower().strip(_EDGE_PUNCT)


def tokenize(text: str) -> list[str]:
    """Normalized tokens of ``text``, punctuation-only tokens dropped."""
    out = []
    for raw in text.split():
        tok = normalize_token(raw)
        if tok:
            out.append(tok)
    return out


def tokenize_with_spans(text: str) -> list[tuple[str, int, int]]:
    """Like :func:`tokenize` but with (token, start, end) character spans.

    The span covers the normalized token inside the original string, i.e.
    edge punctuation is outside the span.
    """
    out = []
    for m in _TOKEN_RE.finditer(text):
        raw = m.group()
        stripped_left = raw.lstrip(_EDGE_PUNCT)
        start = m.start() + (len(raw) - len(stripped_left))
        core = stripped_left.rstrip(_EDGE_PUNCT)
        if not core:
            continue
        out.append((core.lower(), start, start + len(core)))
    return out


def normalize_phrase(text: str) -> str:
    """Canonical form of a multi-word surface: tokens joined by single spaces."""
    return " ".join(tokenize(text))
