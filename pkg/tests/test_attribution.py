import io
import json
import math
import random

import pytest
from hypothesis import given, strategies as st

from topic_explain.attribution import (
    TokenAttribution,
    aggregate_tokens_to_words,
    dumps_attributions,
    ingest_attributions,
    make_instance,
    spans_from_offsets,
)
from topic_explain.errors import ParseError, ValidationError
from topic_explain.text_core import PUNCT_WORD


def record(iid="i1", tokens=(("tasty", 1.0),), groups=None, label="pos", base=0.0):
    toks = [{"text": t, "score": s} for t, s in tokens]
    if groups is None:
        groups = [{"word": None, "start": k, "end": k + 1} for k in range(len(toks))]
    return {"instance_id": iid, "class_label": label, "base_value": base, "tokens": toks, "word_groups": groups}


def jsonl(*records):
    return io.BytesIO("".join(json.dumps(r) + "\n" for r in records).encode())


def test_two_valid_lines():
    out = ingest_attributions(jsonl(record("a"), record("b")))
    assert [i.instance_id for i in out] == ["a", "b"]


def test_nan_score_names_line_and_field():
    good = json.dumps(record("a"))
    bad = '{"instance_id": "b", "class_label": "pos", "base_value": 0, "tokens": [{"text": "x", "score": NaN}], "word_groups": [{"word": null, "start": 0, "end": 1}]}'
    with pytest.raises(ParseError) as exc:
        ingest_attributions(io.StringIO(good + "\n" + bad + "\n"))
    assert exc.value.line == 2
    assert "NaN" in str(exc.value)


def test_string_nan_score_rejected():
    rec = record("a")
    rec["tokens"][0]["score"] = "NaN"
    with pytest.raises(ParseError) as exc:
        ingest_attributions(jsonl(rec))
    assert exc.value.line == 1
    assert "tokens[0].score" in str(exc.value)


@pytest.mark.parametrize(
    "groups, msg",
    [
        ([{"word": None, "start": 0, "end": 2}, {"word": None, "start": 1, "end": 3}], "overlapping"),
        ([{"word": None, "start": 0, "end": 1}, {"word": None, "start": 2, "end": 3}], "gapped"),
        ([{"word": None, "start": 0, "end": 4}], "out of range"),
    ],
)
def test_bad_word_groups(groups, msg):
    rec = record(tokens=(("ta", 0.1), ("sty", 0.2), ("food", 0.3)), groups=groups)
    with pytest.raises(ParseError, match=msg):
        ingest_attributions(jsonl(rec))


def test_duplicate_instance_id():
    with pytest.raises(ParseError, match="duplicate") as exc:
        ingest_attributions(jsonl(record("a"), record("a")))
    assert exc.value.line == 2


def test_same_id_different_class_is_allowed():
    out = ingest_attributions(jsonl(record("a", label="pos"), record("a", label="neg")))
    assert len(out) == 2


def test_malformed_json_line():
    with pytest.raises(ParseError) as exc:
        ingest_attributions(io.StringIO(json.dumps(record("a")) + "\n{oops\n"))
    assert exc.value.line == 2


def test_lenient_skips_bad_lines(caplog):
    stream = io.StringIO(json.dumps(record("a")) + "\n{oops\n" + json.dumps(record("b")) + "\n")
    out = ingest_attributions(stream, lenient=True)
    assert [i.instance_id for i in out] == ["a", "b"]
    assert "line" in caplog.text or ":2:" in caplog.text


def test_punctuation_gap_is_filled():
    rec = record(
        tokens=(("good", 1.0), ("!", 0.25), ("food", 0.5)),
        groups=[{"word": None, "start": 0, "end": 1}, {"word": None, "start": 2, "end": 3}],
    )
    (inst,) = ingest_attributions(jsonl(rec))
    assert [g.word for g in inst.word_groups] == ["good", PUNCT_WORD, "food"]
    assert aggregate_tokens_to_words(inst).values[1] == (PUNCT_WORD, 0.25)


def test_subtokens_merge_into_word():
    inst = make_instance("f1", "pos", 0.0, [TokenAttribution("ta", 0.4), TokenAttribution("sty", 0.33)], [(None, 0, 2)])
    (pair,) = aggregate_tokens_to_words(inst).values
    assert pair[0] == "tasty"
    assert pair[1] == pytest.approx(0.73, abs=1e-12)


def test_single_token_word_identity():
    inst = make_instance("f2", "pos", 0.0, [TokenAttribution("fries", 0.5)], [(None, 0, 1)])
    assert aggregate_tokens_to_words(inst).values == (("fries", 0.5),)


def test_explicit_word_is_kept():
    inst = make_instance("f3", "pos", 0.0, [TokenAttribution("Ġtas", 0.1), TokenAttribution("ty", 0.2)], [("Tasty", 0, 2)])
    assert inst.word_groups[0].word == "tasty"


def random_instance(rng, iid):
    n = rng.randint(1, 12)
    toks = [TokenAttribution(rng.choice(["ta", "sty", "food", "!", "good", "ok", "."]), rng.uniform(-3, 3)) for _ in range(n)]
    cuts = sorted(set(rng.sample(range(1, n), rng.randint(0, n - 1)))) if n > 1 else []
    bounds = [0, *cuts, n]
    groups = [(None, bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
    return make_instance(iid, rng.choice(["pos", "neg"]), rng.uniform(-1, 1), toks, groups)


def test_round_trip_fifty_random_instances():
    rng = random.Random(7)
    original = [random_instance(rng, f"r{i}") for i in range(50)]
    back = ingest_attributions(io.StringIO(dumps_attributions(original)))
    assert back == original


def test_aggregation_preserves_total_on_random_instances():
    rng = random.Random(11)
    for i in range(200):
        inst = random_instance(rng, str(i))
        words = aggregate_tokens_to_words(inst)
        assert abs(math.fsum(v for _, v in words.values) - math.fsum(t.score for t in inst.tokens)) <= 1e-12


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=15))
def test_one_group_sums_all_tokens(scores):
    toks = [TokenAttribution("w", s) for s in scores]
    inst = make_instance("h", "c", 0.0, toks, [(None, 0, len(toks))])
    (pair,) = aggregate_tokens_to_words(inst).values
    assert pair[1] == math.fsum(scores)


def test_non_finite_token_rejected_directly():
    with pytest.raises(ValidationError):
        TokenAttribution("x", float("inf"))


def test_spans_from_offsets_groups_subwords():
    text = "tasty burgers!"
    # "tas" "ty" " burg" "ers" "!"
    offsets = [(0, 3), (3, 5), (5, 10), (10, 13), (13, 14)]
    groups = spans_from_offsets(text, offsets)
    assert [(s, e) for _, s, e in groups] == [(0, 2), (2, 5)]
    toks = [TokenAttribution(text[s:e], 0.1) for s, e in offsets]
    inst = make_instance("o", "c", 0.0, toks, groups)
    assert [g.word for g in inst.word_groups] == ["tasty", "burgers"]
