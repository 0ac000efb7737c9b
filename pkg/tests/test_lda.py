import logging

import numpy as np
import pytest

from lda_fixtures import disjoint_topic_corpus, matched_cosine
from topic_explain.errors import EmptyCorpusError, ValidationError
from topic_explain.text_core import CorpusCounts
from topic_explain.topics import compute_stopwords, lda_train


def test_stopwords_top_k():
    counts = CorpusCounts({"a": 5, "b": 3, "c": 1}, 9)
    assert compute_stopwords(counts, 2) == {"a", "b"}


def test_stopwords_lexicographic_tiebreak():
    counts = CorpusCounts({"c": 5, "b": 5, "a": 5}, 15)
    assert compute_stopwords(counts, 2) == {"a", "b"}


def test_stopwords_k_exceeds_vocab(caplog):
    counts = CorpusCounts({f"w{i}": i + 1 for i in range(50)}, sum(range(1, 51)))
    with caplog.at_level(logging.WARNING):
        out = compute_stopwords(counts, 100)
    assert len(out) == 50
    assert "exceeds vocabulary" in caplog.text


def test_recovers_disjoint_topics():
    docs, phi, vocab = disjoint_topic_corpus(n_docs=150, seed=1)
    model = lda_train(docs, num_topics=3, alpha=5.0, beta=0.01, iterations=200, seed=0)
    assert matched_cosine(model.topic_word, model.vocab, phi, vocab) >= 0.9


def test_rows_are_distributions():
    docs, _, _ = disjoint_topic_corpus(n_docs=20, seed=2)
    model = lda_train(docs, num_topics=4, iterations=10, seed=3)
    assert np.all(model.topic_word >= 0)
    assert np.allclose(model.topic_word.sum(axis=1), 1.0, atol=1e-9)


def test_single_word_corpus():
    model = lda_train([["solo"]], num_topics=2, iterations=5, seed=0)
    assert model.topic_word.shape == (2, 1)
    assert np.allclose(model.topic_word.sum(axis=1), 1.0)
    # the only token sits in exactly one topic
    assert sorted(model.counts[:, 0].tolist()) == [0, 1]


def test_bit_identical_with_same_seed():
    docs, _, _ = disjoint_topic_corpus(n_docs=30, seed=4)
    a = lda_train(docs, num_topics=3, iterations=20, seed=11)
    b = lda_train(docs, num_topics=3, iterations=20, seed=11)
    assert a.topic_word.tobytes() == b.topic_word.tobytes()
    c = lda_train(docs, num_topics=3, iterations=20, seed=12)
    assert a.topic_word.tobytes() != c.topic_word.tobytes()


def test_count_conservation_every_iteration():
    docs, _, _ = disjoint_topic_corpus(n_docs=25, seed=5)
    n_tokens = sum(len(d) for d in docs)
    seen = []
    lda_train(docs, num_topics=3, iterations=15, seed=0,
              on_iteration=lambda i, n_tw: seen.append((i, int(n_tw.sum()))))
    assert seen == [(i, n_tokens) for i in range(1, 16)]


def test_stopwords_leave_the_vocabulary():
    docs = [["the", "cat", "sat"], ["the", "dog", "ran"]]
    model = lda_train(docs, num_topics=2, iterations=5, seed=0, stopwords={"the"})
    assert "the" not in model.vocab
    assert model.training_meta["stopwords"] == ["the"]


def test_all_stopwords_is_an_error():
    with pytest.raises(EmptyCorpusError):
        lda_train([["a", "b"]], num_topics=2, iterations=1, stopwords={"a", "b"})


@pytest.mark.parametrize("kwargs", [{"num_topics": 1}, {"alpha": 0.0}, {"beta": -1.0}, {"iterations": 0}, {"alpha_mode": "x"}])
def test_parameter_validation(kwargs):
    with pytest.raises(ValidationError):
        lda_train([["a", "b"]], **{"num_topics": 2, "iterations": 1, **kwargs})


def test_alpha_modes_recorded():
    m = lda_train([["a", "b"]], num_topics=2, alpha=5.0, iterations=1)
    assert m.training_meta["alpha_per_topic"] == 2.5
    m = lda_train([["a", "b"]], num_topics=2, alpha=5.0, iterations=1, alpha_mode="per-topic")
    assert m.training_meta["alpha_per_topic"] == 5.0
