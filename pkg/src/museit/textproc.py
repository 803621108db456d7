"""Shared text utilities: tokenization and the bundled stopword list."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on every non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


def corpus_tokenize(text: str, stopwords: frozenset[str] | set[str] | None = None) -> list[str]:
    """Tokenize for embedding/counting: drops stopwords and 1-char tokens."""
    if stopwords is None:
        stopwords = default_stopwords()
    return [t for t in tokenize(text) if len(t) >= 2 and t not in stopwords]


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    ref = resources.files("museit.data").joinpath("stopwords.txt")
    words = set()
    for line in ref.read_text(encoding="utf-8").splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)
