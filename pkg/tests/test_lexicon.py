import io
import logging

import pytest

from topic_explain.errors import ParseError
from topic_explain.text_core import Vocabulary
from topic_explain.topics import lexicon_membership, load_lexicon, parse_lexicon

DIC = """%
1\tNEGEMO
2\tANX
3\tPOSEMO
%
afraid\t1\t2
terrif*\t1
terrific\t3
happy 3
"""


def lex(text=DIC):
    return parse_lexicon(io.BytesIO(text.encode()))


def test_parse_categories_and_multi_category_word():
    L = lex()
    assert L.categories == ("NEGEMO", "ANX", "POSEMO")
    assert L.categories_for("afraid") == {0, 1}


def test_prefix_pattern():
    L = lex()
    assert 0 in L.categories_for("terrified")
    assert 0 in L.categories_for("terrific")
    assert L.categories_for("terror") == set()


@pytest.mark.parametrize(
    "body, lineno, msg",
    [
        ("afraid X\n", 4, "no category ids"),
        ("afraid 9\n", 4, "unknown category"),
    ],
)
def test_word_line_errors(body, lineno, msg):
    with pytest.raises(ParseError, match=msg) as exc:
        lex("%\n1 NEGEMO\n%\n" + body)
    assert exc.value.line == lineno


def test_duplicate_category_id():
    with pytest.raises(ParseError, match="duplicate category id") as exc:
        lex("%\n1 A\n1 B\n%\n")
    assert exc.value.line == 3


def test_missing_header():
    with pytest.raises(ParseError):
        lex("afraid 1\n")


def test_two_category_word_gets_half_each():
    mem = lexicon_membership(lex(), Vocabulary.from_words(["afraid"]))
    assert mem.get("afraid") == {0: 0.5, 1: 0.5}


def test_single_category_word_gets_one():
    mem = lexicon_membership(lex(), Vocabulary.from_words(["happy"]))
    assert mem.get("happy") == {2: 1.0}


def test_prefix_and_exact_matches_union():
    # "terrif*" -> NEGEMO and exact "terrific" -> POSEMO
    mem = lexicon_membership(lex(), ["terrific", "terrified", "table"])
    assert mem.get("terrific") == {0: 0.5, 2: 0.5}
    assert mem.get("terrified") == {0: 1.0}
    assert mem.get("table") == {}
    assert mem.coverage == {"terrific", "terrified"}


def test_zero_coverage_warns(caplog):
    with caplog.at_level(logging.WARNING):
        mem = lexicon_membership(lex(), ["table", "chair"])
    assert not mem.membership
    assert "covers none" in caplog.text


def test_fixture_lexicon(golden_dir):
    L = load_lexicon(golden_dir / "membership.dic")
    assert L.categories == ("FOOD", "SERVICE", "PRICE")
    mem = lexicon_membership(L, ["prices", "cold", "great"])
    assert mem.get("prices") == {2: 1.0}
    assert mem.get("cold") == {0: 0.5, 1: 0.5}
    assert mem.get("great") == {}
