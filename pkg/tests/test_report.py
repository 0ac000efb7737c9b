import logging
import re

import numpy as np
import pytest

from topic_explain.aggregate import OTHER_LABEL, ExplanationMetadata, GlobalTopicExplanation
from topic_explain.compare import ComparisonReport, compare
from topic_explain.report import FILENAMES, parse_json, render_csv, render_json, render_report, render_text, topic_words_for
from topic_explain.topics import TopicModel, parse_lexicon

LABELS = ("A", "B", OTHER_LABEL)


def gte(values, model_id):
    return GlobalTopicExplanation(tuple(values), LABELS, ExplanationMetadata(model_id=model_id, source="LDA"))


@pytest.fixture
def report():
    # normalized A = (0.6, 0.4, 0), B = (0.4, 0.6, 0) -> delta (0.2, -0.2, 0)
    return compare(gte([0.6, 0.4, 0.0], "alpha"), gte([0.4, 0.6, 0.0], "beta"), k=2)


def test_json_round_trip(report):
    text = render_json(report)
    assert parse_json(text) == report
    assert render_json(parse_json(text)) == text


def test_csv_shape(report):
    lines = render_csv(report).splitlines()
    assert lines[0] == "section,rank,topic,value_a,value_b,delta"
    assert len(lines) == 4 * report.k + 1
    sections = [l.split(",")[0] for l in lines[1:]]
    assert sections == ["top_a"] * 2 + ["top_b"] * 2 + ["most_different"] * 2 + ["most_similar"] * 2


def test_text_mentions_models_and_tables(report):
    text = render_text(report)
    assert text.startswith("alpha vs beta")
    for title in ("Most important topics", "Least important topics", "Most different", "Most similar"):
        assert title in text


def test_bar_chart_signs(report, tmp_path):
    render_report(report, tmp_path, formats=["svg"], model=None)
    svg = (tmp_path / FILENAMES["svg_bars"]).read_text()
    assert len(re.findall(r'id="bar-pos-\d+"', svg)) == 1
    assert len(re.findall(r'id="bar-neg-\d+"', svg)) == 1
    assert len(re.findall(r'id="bar-zero-\d+"', svg)) == 1
    assert "#2166ac" in svg and "#b2182b" in svg


def test_clouds_skipped_without_model(report, tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        written = render_report(report, tmp_path, formats=["svg"])
    assert [p.name for p in written] == [FILENAMES["svg_bars"]]
    assert "skipping topic word clouds" in caplog.text


def test_clouds_from_topic_model(report, tmp_path):
    model = TopicModel(np.array([[0.7, 0.3, 0.0], [0.0, 0.2, 0.8]]), ("burger", "fries", "waiter"), labels=("A", "B"))
    written = render_report(report, tmp_path, formats=["svg"], model=model)
    assert (tmp_path / FILENAMES["svg_clouds"]) in written
    assert (tmp_path / FILENAMES["svg_clouds"]).read_text().lstrip().startswith("<?xml")


def test_svg_is_deterministic(report, tmp_path):
    render_report(report, tmp_path / "1", formats=["svg"])
    render_report(report, tmp_path / "2", formats=["svg"])
    name = FILENAMES["svg_bars"]
    assert (tmp_path / "1" / name).read_bytes() == (tmp_path / "2" / name).read_bytes()


def test_lexicon_cloud_words():
    lex = parse_lexicon(["%", "1 A", "2 B", "%", "burger 1", "fri* 1", "waiter 2"])
    words = topic_words_for(lex)
    assert words == {"A": [("burger", 1.0), ("fri*", 1.0)], "B": [("waiter", 1.0)]}


def test_unknown_format_rejected(report, tmp_path):
    from topic_explain.errors import ValidationError

    with pytest.raises(ValidationError):
        render_report(report, tmp_path, formats=["pdf"])
