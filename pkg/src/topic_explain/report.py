"""Serialize comparison reports as JSON, CSV, console text, and SVG figures."""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ._io import atomic_write_bytes, atomic_write_text
from .compare import ComparisonReport, RankedDifference
from .errors import ValidationError
from .topics.lexicon import Lexicon
from .topics.model import TopicModel

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "svg", "text")
CSV_COLUMNS = ("section", "rank", "topic", "value_a", "value_b", "delta")
CSV_SECTIONS = ("top_a", "top_b", "most_different", "most_similar")

FILENAMES = {
    "json": "report.json",
    "csv": "report.csv",
    "text": "report.txt",
    "svg_bars": "residual_bars.svg",
    "svg_clouds": "topic_clouds.svg",
}


def render_json(report: ComparisonReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def parse_json(text: str) -> ComparisonReport:
    return ComparisonReport.from_dict(json.loads(text))


def _model_rows(report: ComparisonReport, side: str) -> list[RankedDifference]:
    a, b = report.normalized_a, report.normalized_b
    return [
        RankedDifference(r.rank, r.topic, a[r.topic], b[r.topic], report.delta[r.topic])
        for r in report.per_model[side].most_important
    ]


def render_csv(report: ComparisonReport) -> str:
    """Section-tagged rows; per-model sections list each model's top-k topics."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    sections = {
        "top_a": _model_rows(report, "A"),
        "top_b": _model_rows(report, "B"),
        "most_different": report.most_different,
        "most_similar": report.most_similar,
    }
    for name in CSV_SECTIONS:
        for r in sections[name]:
            w.writerow((name, r.rank, r.topic, repr(r.value_a), repr(r.value_b), repr(r.delta)))
    return buf.getvalue()


def _table(headers: Sequence[str], rows: Iterable[Sequence[str]], right: set[int]) -> list[str]:
    rows = [list(r) for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]

    def fmt(cells):
        return "  ".join(c.rjust(wd) if i in right else c.ljust(wd) for i, (c, wd) in enumerate(zip(cells, widths))).rstrip()

    return [fmt(headers), fmt(["-" * wd for wd in widths])] + [fmt(r) for r in rows]


def render_text(report: ComparisonReport) -> str:
    a, b = report.models
    meta = report.metadata
    out = [
        f"{a} vs {b}",
        f"class={meta.get('class_label')}  source={meta.get('source')}  path={meta.get('path')}  "
        f"scheme={meta.get('scheme')}",
        f"L1 distance: {report.distance_l1:.6g}",
        "",
    ]
    for title, attr in (("Most important topics", "most_important"), ("Least important topics", "least_important")):
        ta, tb = getattr(report.per_model["A"], attr), getattr(report.per_model["B"], attr)
        rows = []
        for ra, rb in zip(ta, tb):
            rows.append([str(ra.rank), ra.topic, f"{ra.importance:.4g}", rb.topic, f"{rb.importance:.4g}"])
        out.append(title)
        out.extend(_table(["rank", a, "importance", b, "importance"], rows, right={0, 2, 4}))
        out.append("")
    for title, rows in (("Most different (A - B)", report.most_different), ("Most similar (A - B)", report.most_similar)):
        out.append(title)
        out.extend(
            _table(
                ["rank", "topic", a, b, "delta"],
                [[str(r.rank), r.topic, f"{r.value_a:.4g}", f"{r.value_b:.4g}", f"{r.delta:+.4g}"] for r in rows],
                right={0, 2, 3, 4},
            )
        )
        out.append("")
    return "\n".join(out)


def topic_words_for(model: TopicModel | Lexicon, k: int = 15) -> dict[str, list[tuple[str, float]]]:
    """Words to draw per topic label, with their within-topic weight.

    LDA topics use P(word | topic); lexicon categories weight every pattern
    equally, as the lexicon itself does.
    """
    if isinstance(model, TopicModel):
        return {label: model.top_words(t, k) for t, label in enumerate(model.labels)}
    if isinstance(model, Lexicon):
        return {c: [(p, 1.0) for p in sorted(model.patterns_for(c))[:k]] for c in model.categories}
    raise ValidationError(f"cannot draw topic words from {type(model).__name__}")


def render_report(
    report: ComparisonReport,
    out_dir,
    formats: Sequence[str] = FORMATS,
    model: TopicModel | Lexicon | None = None,
) -> list[Path]:
    """Write the requested formats into ``out_dir``; returns the files written."""
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ValidationError(f"unknown report formats: {sorted(unknown)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        written.append(atomic_write_text(out_dir / FILENAMES["json"], render_json(report)))
    if "csv" in formats:
        written.append(atomic_write_text(out_dir / FILENAMES["csv"], render_csv(report)))
    if "text" in formats:
        written.append(atomic_write_text(out_dir / FILENAMES["text"], render_text(report)))
    if "svg" in formats:
        from .plotting import residual_bar_svg, topic_cloud_svg

        written.append(atomic_write_bytes(out_dir / FILENAMES["svg_bars"], residual_bar_svg(report)))
        if model is None:
            logger.warning("no topic model or lexicon given; skipping topic word clouds")
        else:
            written.append(
                atomic_write_bytes(out_dir / FILENAMES["svg_clouds"], topic_cloud_svg(report, topic_words_for(model)))
            )
    return written
