import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from topic_explain.errors import ParseError, ValidationError
from topic_explain.topics import TopicModel, dumps_topic_matrix, lda_membership, read_topic_matrix


def test_equal_mass_splits_evenly():
    m = TopicModel(np.array([[0.5, 0.5], [0.5, 0.5]]), ("w", "x"))
    assert lda_membership(m).get("w") == {0: 0.5, 1: 0.5}


def test_direct_renormalization():
    m = TopicModel(np.array([[0.03, 0.97], [0.01, 0.99]]), ("w", "x"))
    mem = lda_membership(m).get("w")
    assert mem[0] == pytest.approx(0.75, abs=1e-15)
    assert mem[1] == pytest.approx(0.25, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 6), st.integers(1, 12)), elements=st.floats(1e-6, 1.0)))
def test_membership_sums_to_one(raw):
    tw = raw / raw.sum(axis=1, keepdims=True)
    m = TopicModel(tw, tuple(f"w{i}" for i in range(tw.shape[1])))
    mem = lda_membership(m)
    for w in m.vocab:
        assert abs(sum(mem.get(w).values()) - 1.0) < 1e-12


def test_rows_must_be_distributions():
    with pytest.raises(ValidationError):
        TopicModel(np.array([[0.5, 0.4]]), ("a", "b"))


def test_top_words_order():
    m = TopicModel(np.array([[0.2, 0.5, 0.3]]), ("a", "b", "c"))
    assert [w for w, _ in m.top_words(0, 2)] == ["b", "c"]


def test_csv_round_trip_is_exact():
    rng = np.random.default_rng(0)
    tw = rng.dirichlet(np.ones(7), size=3)
    m = TopicModel(tw, tuple("abcdefg"))
    back = read_topic_matrix(io.StringIO(dumps_topic_matrix(m)))
    assert back.vocab == m.vocab
    assert np.allclose(back.topic_word, m.topic_word, rtol=0, atol=1e-15)


def test_csv_header_with_spaces_accepted():
    text = "topic_id, word, p_word_given_topic\n0,a,0.5\n0,b,0.5\n1,a,1.0\n"
    m = read_topic_matrix(io.StringIO(text))
    assert m.topic_word.tolist() == [[0.5, 0.5], [1.0, 0.0]]


def test_csv_rejects_bad_row_sum():
    with pytest.raises(ParseError, match="sums to"):
        read_topic_matrix(io.StringIO("topic_id,word,p_word_given_topic\n0,a,0.5\n0,b,0.4\n"))


def test_csv_reports_line_numbers():
    with pytest.raises(ParseError) as exc:
        read_topic_matrix(io.StringIO("topic_id,word,p_word_given_topic\n0,a,1.0\n1,b,zz\n"))
    assert exc.value.line == 3
