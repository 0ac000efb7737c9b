"""Topic-word matrices and the per-word topic memberships derived from them."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from ..errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

CSV_HEADER = ("topic_id", "word", "p_word_given_topic")


def topic_label(t: int, width: int = 2) -> str:
    return f"topic_{t:0{width}d}"


@dataclass(frozen=True)
class TopicModel:
    """``topic_word[t, v]`` is P(word v | topic t); each row is a distribution."""

    topic_word: np.ndarray
    vocab: tuple[str, ...]
    labels: tuple[str, ...] = ()
    training_meta: Mapping = field(default_factory=dict)
    # final-state topic x word assignment counts, when trained here
    counts: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        tw = np.asarray(self.topic_word, dtype=float)
        if tw.ndim != 2 or tw.shape[1] != len(self.vocab):
            raise ValidationError(
                f"topic_word shape {tw.shape} does not match vocabulary size {len(self.vocab)}"
            )
        if tw.shape[0] < 1:
            raise ValidationError("topic model needs at least one topic")
        if np.any(tw < 0) or not np.all(np.isfinite(tw)):
            raise ValidationError("topic_word entries must be finite and non-negative")
        sums = tw.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > 1e-9)
        if bad.size:
            raise ValidationError(f"topic {int(bad[0])} row sums to {sums[bad[0]]!r}, not 1")
        if len(set(self.vocab)) != len(self.vocab):
            raise ValidationError("duplicate words in topic model vocabulary")
        object.__setattr__(self, "topic_word", tw)
        if not self.labels:
            width = max(2, len(str(tw.shape[0] - 1)))
            object.__setattr__(self, "labels", tuple(topic_label(t, width) for t in range(tw.shape[0])))
        elif len(self.labels) != tw.shape[0]:
            raise ValidationError("one label per topic required")

    @property
    def num_topics(self) -> int:
        return self.topic_word.shape[0]

    def top_words(self, t: int, k: int = 15) -> list[tuple[str, float]]:
        row = self.topic_word[t]
        # descending probability, then word
        order = sorted(range(len(self.vocab)), key=lambda v: (-row[v], self.vocab[v]))[:k]
        return [(self.vocab[v], float(row[v])) for v in order]


@dataclass(frozen=True)
class TopicMembership:
    """P(topic | word) for the words some topic covers.

    Words missing from ``membership`` are uncovered and route to the OTHER
    bucket during aggregation.
    """

    labels: tuple[str, ...]
    membership: Mapping[str, Mapping[int, float]]
    source: str  # "LDA" or "LEXICON"

    @property
    def num_topics(self) -> int:
        return len(self.labels)

    @property
    def coverage(self) -> frozenset:
        return frozenset(w for w, m in self.membership.items() if m)

    def get(self, word: str) -> Mapping[int, float]:
        return self.membership.get(word, {})


def lda_membership(model: TopicModel) -> TopicMembership:
    """Per-word renormalization over topics, assuming a uniform topic prior.

    ``P(t | w) = P(w | t) / sum_t' P(w | t')``. Words with zero mass in every
    topic (only possible for imported matrices) are left uncovered.
    """
    tw = model.topic_word
    col = tw.sum(axis=0)
    membership: dict[str, dict[int, float]] = {}
    for v, word in enumerate(model.vocab):
        if col[v] <= 0:
            logger.warning("word %r has zero mass in every topic; routed to OTHER", word)
            continue
        denom = math.fsum(tw[:, v])
        membership[word] = {t: float(tw[t, v] / denom) for t in range(tw.shape[0]) if tw[t, v] > 0}
    return TopicMembership(model.labels, membership, "LDA")


def write_topic_matrix(model: TopicModel, fh) -> None:
    """CSV rows ``topic_id,word,p_word_given_topic``; floats in repr form."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for t in range(model.num_topics):
        for v, word in enumerate(model.vocab):
            w.writerow((t, word, repr(float(model.topic_word[t, v]))))


def dumps_topic_matrix(model: TopicModel) -> str:
    buf = io.StringIO()
    write_topic_matrix(model, buf)
    return buf.getvalue()


def read_topic_matrix(fh, source: str | None = None, tol: float = 1e-6) -> TopicModel:
    """Import a topic matrix CSV, e.g. one converted from MALLET output.

    Rows for a topic must sum to 1 within ``tol``; they are renormalized
    exactly afterwards. Missing (topic, word) pairs are zero.
    """
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty topic matrix file", line=1, source=source) from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ParseError(f"expected header {','.join(CSV_HEADER)}", line=1, source=source)
    entries: dict[tuple[int, str], float] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 columns, got {len(row)}", line=lineno, source=source)
        try:
            t = int(row[0].strip())
            p = float(row[2].strip())
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, source=source) from None
        word = row[1].strip()
        if t < 0 or not word or not math.isfinite(p) or p < 0:
            raise ParseError(f"invalid row {row!r}", line=lineno, source=source)
        if (t, word) in entries:
            raise ParseError(f"duplicate entry for topic {t}, word {word!r}", line=lineno, source=source)
        entries[(t, word)] = p
    if not entries:
        raise ParseError("topic matrix has no rows", source=source)
    topics = sorted({t for t, _ in entries})
    if topics != list(range(len(topics))):
        raise ParseError(f"topic ids must be 0..T-1, got {topics}", source=source)
    vocab = tuple(sorted({w for _, w in entries}))
    index = {w: i for i, w in enumerate(vocab)}
    tw = np.zeros((len(topics), len(vocab)))
    for (t, w), p in entries.items():
        tw[t, index[w]] = p
    for t in topics:
        s = math.fsum(tw[t])
        if abs(s - 1.0) > tol:
            raise ParseError(f"topic {t} sums to {s!r}, not 1 within {tol}", source=source)
        tw[t] /= s
    return TopicModel(tw, vocab, training_meta={"imported_from": source})


def load_topic_matrix(path) -> TopicModel:
    with open(path, newline="", encoding="utf-8") as fh:
        return read_topic_matrix(fh, source=str(path))


def membership_from_mapping(
    labels: Sequence[str], mapping: Mapping[str, Mapping[str, float]], source: str = "LEXICON"
) -> TopicMembership:
    """Build a membership from ``{word: {label: weight}}``, normalizing per word."""
    idx = {l: i for i, l in enumerate(labels)}
    out = {}
    for word, weights in mapping.items():
        total = math.fsum(weights.values())
        if total <= 0:
            continue
        out[word] = {idx[l]: w / total for l, w in weights.items() if w > 0}
    return TopicMembership(tuple(labels), out, source)
