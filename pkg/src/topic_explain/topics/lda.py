"""Collapsed Gibbs sampling for LDA with symmetric Dirichlet priors.

``alpha`` follows the MALLET convention by default: it is the *total*
document-topic concentration, so each topic gets ``alpha / T``. Pass
``alpha_mode="per-topic"`` to use ``alpha`` for every topic instead.
"""

from __future__ import annotations

import logging
from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import EmptyCorpusError, InvariantViolation, ValidationError
from ..text_core import CorpusCounts, normalize_word
from .model import TopicModel

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn

logger = logging.getLogger(__name__)

DEFAULT_TOPICS = 30
DEFAULT_ALPHA = 5.0
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 1000
DEFAULT_STOPWORDS_K = 100
ALPHA_MODES = ("total", "per-topic")


def compute_stopwords(counts: CorpusCounts, k: int = DEFAULT_STOPWORDS_K) -> frozenset:
    """The ``k`` most frequent words, ties broken lexicographically.

    Exactly ``k`` words come back; if the vocabulary is smaller, all of it
    does and a warning is logged.
    """
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    if counts.total == 0:
        raise EmptyCorpusError("cannot pick stopwords from an empty corpus")
    if k > len(counts.word_count):
        logger.warning(
            "stopword k=%d exceeds vocabulary size %d; every word becomes a stopword",
            k,
            len(counts.word_count),
        )
    ranked = sorted(counts.word_count.items(), key=lambda kv: (-kv[1], kv[0]))
    return frozenset(w for w, _ in ranked[:k])


@njit(cache=True)
def _gibbs_sweep(words, docs, z, u, n_dt, n_tw, n_t, alpha_t, beta, v_beta):
    T = n_t.shape[0]
    p = np.empty(T)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        t = z[i]
        n_dt[d, t] -= 1
        n_tw[t, w] -= 1
        n_t[t] -= 1
        total = 0.0
        for k in range(T):
            total += (n_dt[d, k] + alpha_t) * (n_tw[k, w] + beta) / (n_t[k] + v_beta)
            p[k] = total
        target = u[i] * total
        t = T - 1
        for k in range(T):
            if target < p[k]:
                t = k
                break
        z[i] = t
        n_dt[d, t] += 1
        n_tw[t, w] += 1
        n_t[t] += 1


def _check_counts(n_dt, n_tw, n_t, n_tokens, iteration):
    if (
        n_tw.sum() != n_tokens
        or n_dt.sum() != n_tokens
        or not np.array_equal(n_t, n_tw.sum(axis=1))
        or n_tw.min() < 0
        or n_dt.min() < 0
    ):
        raise InvariantViolation(f"Gibbs count conservation broken at iteration {iteration}")


def prepare_corpus(
    corpus: Iterable[Sequence[str]], stopwords: Iterable[str] = ()
) -> tuple[list[list[str]], tuple[str, ...]]:
    """Normalize words, drop empties and stopwords; return docs and sorted vocab."""
    stop = {w for w in (normalize_word(s) for s in stopwords) if w is not None}
    docs = []
    for doc in corpus:
        docs.append([w for w in (normalize_word(x) for x in doc) if w is not None and w not in stop])
    vocab = tuple(sorted({w for doc in docs for w in doc}))
    return docs, vocab


def lda_train(
    corpus: Iterable[Sequence[str]],
    num_topics: int = DEFAULT_TOPICS,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
    stopwords: Iterable[str] = (),
    alpha_mode: str = "total",
    check_invariants: bool = True,
    on_iteration: Callable[[int, np.ndarray], None] | None = None,
) -> TopicModel:
    """Fit LDA by collapsed Gibbs sampling and return the final-state topic-word matrix.

    Documents are swept in the given order, so identical input order and
    seed give bit-identical output. Stopwords are removed from the model
    vocabulary entirely. ``on_iteration(i, n_tw)`` sees the topic-word counts
    after every sweep.
    """
    if num_topics < 2:
        raise ValidationError(f"need at least 2 topics, got {num_topics}")
    if not (alpha > 0 and beta > 0):
        raise ValidationError("alpha and beta must be positive")
    if iterations < 1:
        raise ValidationError("iterations must be positive")
    if alpha_mode not in ALPHA_MODES:
        raise ValidationError(f"alpha_mode must be one of {ALPHA_MODES}")
    stopwords = frozenset(stopwords)
    docs, vocab = prepare_corpus(corpus, stopwords)
    if not vocab:
        raise EmptyCorpusError("every document is empty after stopword removal")

    index = {w: i for i, w in enumerate(vocab)}
    words = np.array([index[w] for doc in docs for w in doc], dtype=np.int64)
    doc_of = np.array([d for d, doc in enumerate(docs) for _ in doc], dtype=np.int64)
    n_tokens = len(words)
    T, V = num_topics, len(vocab)
    alpha_t = alpha / T if alpha_mode == "total" else alpha

    rng = np.random.default_rng(seed)
    z = rng.integers(0, T, size=n_tokens).astype(np.int64)
    n_dt = np.zeros((len(docs), T), dtype=np.int64)
    n_tw = np.zeros((T, V), dtype=np.int64)
    np.add.at(n_dt, (doc_of, z), 1)
    np.add.at(n_tw, (z, words), 1)
    n_t = n_tw.sum(axis=1)
    if check_invariants:
        _check_counts(n_dt, n_tw, n_t, n_tokens, 0)

    for it in range(1, iterations + 1):
        u = rng.random(n_tokens)
        _gibbs_sweep(words, doc_of, z, u, n_dt, n_tw, n_t, alpha_t, beta, V * beta)
        if check_invariants:
            _check_counts(n_dt, n_tw, n_t, n_tokens, it)
        if on_iteration is not None:
            on_iteration(it, n_tw)
        if it % 100 == 0:
            logger.info("lda iteration %d/%d", it, iterations)

    topic_word = (n_tw + beta) / (n_t + V * beta)[:, None]
    meta = {
        "num_topics": T,
        "alpha": alpha,
        "alpha_mode": alpha_mode,
        "alpha_per_topic": alpha_t,
        "beta": beta,
        "iterations": iterations,
        "seed": seed,
        "stopwords": sorted(stopwords),
        "tokens": n_tokens,
    }
    return TopicModel(topic_word, vocab, training_meta=meta, counts=n_tw.copy())


def read_corpus(fh) -> list[list[str]]:
    """One document per line, whitespace-separated raw words."""
    return [line.split() for line in fh]
