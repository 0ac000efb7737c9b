"""Word identity, vocabularies and corpus counts."""

from __future__ import annotations

import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import EmptyCorpusError

# Stand-in word for groups whose text is nothing but punctuation.
PUNCT_WORD = "⟨punct⟩"


def _is_edge_char(ch: str) -> bool:
    return ch.isspace() or unicodedata.category(ch).startswith("P")


def normalize_word(raw: str) -> str | None:
    """NFC, lowercase, strip edge punctuation and whitespace.

    Returns ``None`` when nothing is left. Interior punctuation survives,
    so ``"don't"`` stays ``"don't"``.
    """
    s = unicodedata.normalize("NFC", raw).lower()
    start, end = 0, len(s)
    while start < end and _is_edge_char(s[start]):
        start += 1
    while end > start and _is_edge_char(s[end - 1]):
        end -= 1
    return s[start:end] or None


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    index: Mapping[str, int] = field(repr=False, compare=False)

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Vocabulary":
        ordered = tuple(sorted(set(words)))
        return cls(ordered, {w: i for i, w in enumerate(ordered)})

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: object) -> bool:
        return word in self.index

    def __iter__(self):
        return iter(self.words)


@dataclass(frozen=True)
class CorpusCounts:
    word_count: Mapping[str, int]
    total: int

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "CorpusCounts":
        counter = Counter(words)
        return cls(dict(counter), sum(counter.values()))

    def __getitem__(self, word: str) -> int:
        return self.word_count[word]

    def __contains__(self, word: object) -> bool:
        return word in self.word_count

    def merge(self, other: "CorpusCounts") -> "CorpusCounts":
        merged = Counter(self.word_count)
        merged.update(other.word_count)
        return CorpusCounts(dict(merged), self.total + other.total)


def build_vocabulary(instances) -> tuple[Vocabulary, CorpusCounts]:
    """Vocabulary and occurrence counts over the word groups of ``instances``.

    Punctuation-only groups count under ``PUNCT_WORD`` so that every word the
    aggregation step can emit has a count.
    """
    counts = CorpusCounts.from_words(
        group.word for inst in instances for group in inst.word_groups
    )
    if counts.total == 0:
        raise EmptyCorpusError("corpus has no words")
    return Vocabulary.from_words(counts.word_count), counts


def count_documents(docs: Iterable[Iterable[str]]) -> CorpusCounts:
    """Counts over raw word lists; words that normalize to nothing are dropped."""
    words = []
    for doc in docs:
        for raw in doc:
            w = normalize_word(raw)
            if w is not None:
                words.append(w)
    if not words:
        raise EmptyCorpusError("corpus has no words")
    return CorpusCounts.from_words(words)
