"""Model-vs-model comparison of topic explanations.

Explanations are L1-normalized, then subtracted topic-wise (A minus B). A
positive residual means the topic matters more to model A.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .aggregate import OTHER_LABEL, ExplanationMetadata, GlobalTopicExplanation
from .errors import ComparisonRefusedError, DegenerateExplanationError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizedExplanation:
    values: tuple[float, ...]
    topic_labels: tuple[str, ...]
    metadata: ExplanationMetadata

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.topic_labels, self.values))


@dataclass(frozen=True)
class ResidualExplanation:
    delta: tuple[float, ...]
    topic_labels: tuple[str, ...]
    model_a: str
    model_b: str

    @property
    def distance_l1(self) -> float:
        return math.fsum(abs(d) for d in self.delta)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.topic_labels, self.delta))


@dataclass(frozen=True)
class RankedDifference:
    rank: int
    topic: str
    value_a: float
    value_b: float
    delta: float


@dataclass(frozen=True)
class RankedImportance:
    rank: int
    topic: str
    importance: float


@dataclass(frozen=True)
class ModelTables:
    model_id: str
    most_important: tuple[RankedImportance, ...]
    least_important: tuple[RankedImportance, ...]


@dataclass(frozen=True)
class ComparisonReport:
    models: tuple[str, str]
    k: int
    metadata: Mapping
    topic_labels: tuple[str, ...]
    normalized_a: Mapping[str, float]
    normalized_b: Mapping[str, float]
    delta: Mapping[str, float]
    distance_l1: float
    most_different: tuple[RankedDifference, ...]
    most_similar: tuple[RankedDifference, ...]
    per_model: Mapping[str, ModelTables]  # keys "A" and "B"

    def to_dict(self) -> dict:
        def imp(rows):
            return [{"rank": r.rank, "topic": r.topic, "importance": r.importance} for r in rows]

        def diff(rows):
            return [
                {"rank": r.rank, "topic": r.topic, "value_a": r.value_a, "value_b": r.value_b, "delta": r.delta}
                for r in rows
            ]

        return {
            "models": list(self.models),
            "k": self.k,
            "metadata": dict(self.metadata),
            "topic_labels": list(self.topic_labels),
            "normalized": {"A": dict(self.normalized_a), "B": dict(self.normalized_b)},
            "distance_l1": self.distance_l1,
            "delta": dict(self.delta),
            "most_different": diff(self.most_different),
            "most_similar": diff(self.most_similar),
            "per_model": {
                side: {
                    "model_id": t.model_id,
                    "most_important": imp(t.most_important),
                    "least_important": imp(t.least_important),
                }
                for side, t in self.per_model.items()
            },
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ComparisonReport":
        def imp(rows):
            return tuple(RankedImportance(int(r["rank"]), r["topic"], float(r["importance"])) for r in rows)

        def diff(rows):
            return tuple(
                RankedDifference(int(r["rank"]), r["topic"], float(r["value_a"]), float(r["value_b"]), float(r["delta"]))
                for r in rows
            )

        try:
            return cls(
                models=tuple(d["models"]),
                k=int(d["k"]),
                metadata=dict(d["metadata"]),
                topic_labels=tuple(d["topic_labels"]),
                normalized_a=dict(d["normalized"]["A"]),
                normalized_b=dict(d["normalized"]["B"]),
                delta=dict(d["delta"]),
                distance_l1=float(d["distance_l1"]),
                most_different=diff(d["most_different"]),
                most_similar=diff(d["most_similar"]),
                per_model={
                    side: ModelTables(t["model_id"], imp(t["most_important"]), imp(t["least_important"]))
                    for side, t in d["per_model"].items()
                },
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed comparison report: {exc}") from None


def l1_normalize(G: GlobalTopicExplanation) -> NormalizedExplanation:
    total = math.fsum(G.G)
    if not total > 0:
        raise DegenerateExplanationError(
            f"explanation for model {G.metadata.model_id!r} is all zeros; cannot L1-normalize"
        )
    return NormalizedExplanation(tuple(x / total for x in G.G), G.topic_labels, G.metadata)


def _check_comparable(a: NormalizedExplanation, b: NormalizedExplanation) -> None:
    if a.topic_labels != b.topic_labels:
        raise ComparisonRefusedError(
            f"topic labels differ: {list(a.topic_labels)} vs {list(b.topic_labels)}"
        )
    ma, mb = a.metadata, b.metadata
    if ma.source != mb.source:
        raise ComparisonRefusedError(f"membership source differs: {ma.source} vs {mb.source}")
    if ma.path != mb.path:
        raise ComparisonRefusedError(f"aggregation path differs: {ma.path.value} vs {mb.path.value}")
    if ma.scheme != mb.scheme:
        logger.warning("weighting schemes differ: %s vs %s", ma.scheme, mb.scheme)
    if ma.class_label != mb.class_label:
        logger.warning("class labels differ: %r vs %r", ma.class_label, mb.class_label)


def residual(a: NormalizedExplanation, b: NormalizedExplanation) -> ResidualExplanation:
    """Topic-wise ``a - b``. Refuses explanations from different topic spaces."""
    _check_comparable(a, b)
    delta = tuple(x - y for x, y in zip(a.values, b.values))
    return ResidualExplanation(delta, a.topic_labels, a.metadata.model_id, b.metadata.model_id)


def _ranked(labels: Sequence[str], key) -> list[str]:
    return sorted(labels, key=lambda t: (key(t), t))


def rank_topics(
    r: ResidualExplanation,
    per_model: tuple[NormalizedExplanation, NormalizedExplanation],
    k: int = 3,
    exclude_other: bool = False,
) -> ComparisonReport:
    """Most/least important topics per model and most different/similar across them.

    Ties are broken by topic label. Every table has ``min(k, topics)`` rows.
    """
    if k < 1:
        raise ValidationError(f"k must be at least 1, got {k}")
    a, b = per_model
    labels = list(r.topic_labels)
    if exclude_other:
        labels.remove(OTHER_LABEL)
    va, vb, d = a.as_dict(), b.as_dict(), r.as_dict()

    def diff_rows(order):
        return tuple(
            RankedDifference(i + 1, t, va[t], vb[t], d[t]) for i, t in enumerate(order[:k])
        )

    def imp_rows(vec, order):
        return tuple(RankedImportance(i + 1, t, vec[t]) for i, t in enumerate(order[:k]))

    tables = {}
    for side, vec, meta in (("A", va, a.metadata), ("B", vb, b.metadata)):
        tables[side] = ModelTables(
            meta.model_id,
            imp_rows(vec, _ranked(labels, lambda t: -vec[t])),
            imp_rows(vec, _ranked(labels, lambda t: vec[t])),
        )
    ma = a.metadata
    return ComparisonReport(
        models=(r.model_a, r.model_b),
        k=k,
        metadata={
            "class_label": ma.class_label,
            "source": ma.source,
            "path": ma.path.value,
            "scheme": ma.scheme.value if ma.scheme is not None else None,
            "exclude_other": exclude_other,
        },
        topic_labels=tuple(r.topic_labels),
        normalized_a=va,
        normalized_b=vb,
        delta=d,
        distance_l1=r.distance_l1,
        most_different=diff_rows(_ranked(labels, lambda t: -abs(d[t]))),
        most_similar=diff_rows(_ranked(labels, lambda t: abs(d[t]))),
        per_model=tables,
    )


def compare(
    a: GlobalTopicExplanation, b: GlobalTopicExplanation, k: int = 3, exclude_other: bool = False
) -> ComparisonReport:
    na, nb = l1_normalize(a), l1_normalize(b)
    return rank_topics(residual(na, nb), (na, nb), k, exclude_other)
