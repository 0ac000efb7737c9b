"""SVG figures for comparison reports: residual bars and topic word clouds."""

from __future__ import annotations

import io
import logging
from typing import Mapping, Sequence

import matplotlib
from matplotlib.figure import Figure

from .compare import ComparisonReport

logger = logging.getLogger(__name__)

POSITIVE_COLOR = "#2166ac"  # topic matters more to model A
NEGATIVE_COLOR = "#b2182b"  # topic matters more to model B
NEUTRAL_COLOR = "#8c8c8c"

CLOUD_WORDS = 15

_RC = {
    "svg.fonttype": "path",  # glyphs as paths: no external fonts needed
    "svg.hashsalt": "topic-explain",
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def delta_color(d: float) -> str:
    if d > 0:
        return POSITIVE_COLOR
    if d < 0:
        return NEGATIVE_COLOR
    return NEUTRAL_COLOR


def _color_class(d: float) -> str:
    return "pos" if d > 0 else "neg" if d < 0 else "zero"


def _svg_bytes(fig: Figure) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def residual_bar_svg(report: ComparisonReport) -> bytes:
    """Horizontal bars of the signed residual, one per topic, largest |delta| on top.

    Each bar's SVG group id is ``bar-{pos|neg|zero}-{index}``.
    """
    labels = sorted(report.delta, key=lambda t: (abs(report.delta[t]), t))
    values = [report.delta[t] for t in labels]
    a, b = report.models
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(6.0, 0.8 + 0.32 * len(labels)))
        ax = fig.add_subplot()
        bars = ax.barh(range(len(labels)), values, color=[delta_color(v) for v in values], height=0.7)
        for i, (bar, v) in enumerate(zip(bars, values)):
            bar.set_gid(f"bar-{_color_class(v)}-{i}")
        ax.set_yticks(range(len(labels)), labels)
        ax.axvline(0.0, color="black", linewidth=0.8)
        ax.set_xlabel(f"normalized importance difference ({a} - {b})")
        ax.set_title(f"{a} vs {b}: L1 distance {report.distance_l1:.4g}")
        fig.tight_layout()
        return _svg_bytes(fig)


def _flow_layout(words: Sequence[tuple[str, float]], width_pt: float, height_pt: float):
    """Greedy row packing of words, font size proportional to weight."""
    if not words:
        return []
    top = max(w for _, w in words) or 1.0
    sized = [(word, 7.0 + 15.0 * (w / top)) for word, w in words]
    rows: list[list[tuple[str, float, float]]] = [[]]
    used = 0.0
    for word, size in sized:
        est = 0.6 * size * (len(word) + 1)
        if rows[-1] and used + est > width_pt:
            rows.append([])
            used = 0.0
        rows[-1].append((word, size, est))
        used += est
    heights = [max(s for _, s, _ in row) * 1.3 for row in rows]
    total_h = sum(heights)
    placed = []
    y = 0.5 + total_h / 2 / height_pt
    for row, h in zip(rows, heights):
        y -= h / 2 / height_pt
        row_w = sum(e for _, _, e in row)
        x = 0.5 - row_w / 2 / width_pt
        for word, size, est in row:
            placed.append((word, size, x + est / 2 / width_pt, y))
            x += est / width_pt
        y -= h / 2 / height_pt
    return placed


def topic_cloud_svg(
    report: ComparisonReport,
    topic_words: Mapping[str, Sequence[tuple[str, float]]],
    topics: Sequence[str] | None = None,
) -> bytes:
    """One word cloud panel per ranked topic, tinted by the residual's sign."""
    if topics is None:
        topics = []
        for row in (*report.most_different, *report.most_similar):
            if row.topic not in topics:
                topics.append(row.topic)
    topics = [t for t in topics if topic_words.get(t)]
    ncols = min(3, max(1, len(topics)))
    nrows = max(1, -(-len(topics) // ncols))
    panel_w, panel_h = 3.2, 2.2
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(panel_w * ncols, panel_h * nrows))
        for i, topic in enumerate(topics):
            ax = fig.add_subplot(nrows, ncols, i + 1)
            ax.set_axis_off()
            d = report.delta.get(topic, 0.0)
            color = delta_color(d)
            ax.set_title(f"{topic} ({d:+.3g})", color=color)
            words = list(topic_words[topic])[:CLOUD_WORDS]
            for word, size, x, y in _flow_layout(words, panel_w * 72 * 0.9, panel_h * 72 * 0.75):
                ax.text(x, y, word, fontsize=size, color=color, ha="center", va="center",
                        transform=ax.transAxes)
        fig.tight_layout()
        return _svg_bytes(fig)
