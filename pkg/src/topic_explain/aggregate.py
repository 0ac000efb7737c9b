"""Word- and topic-level importance from local attributions.

Two routes produce a global topic explanation:

* ``GLOBAL_WORD``: absolute local word values are pooled per word (times a
  weighting C(w)), then spread over topics by P(topic | word).
* ``LOCAL_ADDITIVE``: signed word values are spread over topics inside each
  instance first, so every local topic vector sums to the instance's total
  attribution; the global vector is the sum of absolute local entries.

Both always carry a trailing OTHER bucket for words no topic covers.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .attribution import InstanceAttribution, WordLocalValues, aggregate_tokens_to_words
from .errors import EmptyCorpusError, ValidationError
from .text_core import CorpusCounts, build_vocabulary
from .topics.model import TopicMembership

OTHER_LABEL = "OTHER"


class WeightingScheme(str, Enum):
    SUM = "SUM"
    INVERSE_FREQUENCY = "INVERSE_FREQUENCY"


class AggregationPath(str, Enum):
    GLOBAL_WORD = "GLOBAL_WORD"
    LOCAL_ADDITIVE = "LOCAL_ADDITIVE"


@dataclass(frozen=True)
class GlobalWordImportance:
    g: Mapping[str, float]
    scheme: WeightingScheme
    instance_count: int


@dataclass(frozen=True)
class ExplanationMetadata:
    model_id: str = ""
    dataset_id: str = ""
    class_label: str = ""
    scheme: WeightingScheme | None = None  # unused on the LOCAL_ADDITIVE path
    source: str = ""
    path: AggregationPath = AggregationPath.GLOBAL_WORD
    config: Mapping = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "dataset_id": self.dataset_id,
            "class_label": self.class_label,
            "scheme": self.scheme.value if self.scheme is not None else None,
            "source": self.source,
            "path": self.path.value,
            "config": dict(self.config),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ExplanationMetadata":
        scheme = d.get("scheme")
        return cls(
            model_id=str(d.get("model_id", "")),
            dataset_id=str(d.get("dataset_id", "")),
            class_label=str(d.get("class_label", "")),
            scheme=WeightingScheme(scheme) if scheme is not None else None,
            source=str(d.get("source", "")),
            path=AggregationPath(d.get("path", AggregationPath.GLOBAL_WORD.value)),
            config=dict(d.get("config", {})),
        )


@dataclass(frozen=True)
class GlobalTopicExplanation:
    """Non-negative topic importances; the last entry is always OTHER."""

    G: tuple[float, ...]
    topic_labels: tuple[str, ...]
    metadata: ExplanationMetadata = field(default_factory=ExplanationMetadata)

    def __post_init__(self):
        object.__setattr__(self, "G", tuple(float(x) for x in self.G))
        object.__setattr__(self, "topic_labels", tuple(self.topic_labels))
        if len(self.G) != len(self.topic_labels):
            raise ValidationError(
                f"{len(self.G)} importances for {len(self.topic_labels)} topic labels"
            )
        if not self.topic_labels or self.topic_labels[-1] != OTHER_LABEL:
            raise ValidationError(f"last topic label must be {OTHER_LABEL!r}")
        if len(set(self.topic_labels)) != len(self.topic_labels):
            raise ValidationError("topic labels must be unique")
        if any(not math.isfinite(x) or x < 0 for x in self.G):
            raise ValidationError("topic importances must be finite and non-negative")

    @property
    def num_topics(self) -> int:
        """Number of real topics, OTHER excluded."""
        return len(self.G) - 1

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.topic_labels, self.G))

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata.to_dict(),
            "topic_labels": list(self.topic_labels),
            "G": list(self.G),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "GlobalTopicExplanation":
        try:
            return cls(
                tuple(d["G"]),
                tuple(d["topic_labels"]),
                ExplanationMetadata.from_dict(d.get("metadata", {})),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed explanation document: {exc}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def loads(cls, text: str) -> "GlobalTopicExplanation":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"explanation is not valid JSON: {exc}") from None


@dataclass(frozen=True)
class LocalTopicExplanation:
    """Signed per-instance topic vector; sums to the instance's total attribution."""

    instance_id: str
    L: tuple[float, ...]
    base_value: float
    topic_labels: tuple[str, ...]

    @property
    def total(self) -> float:
        return math.fsum(self.L)


def _labels(membership: TopicMembership) -> tuple[str, ...]:
    if OTHER_LABEL in membership.labels:
        raise ValidationError(f"topic label {OTHER_LABEL!r} is reserved")
    return tuple(membership.labels) + (OTHER_LABEL,)


def global_word_importance(
    instances: Iterable[WordLocalValues],
    counts: CorpusCounts,
    scheme: WeightingScheme = WeightingScheme.INVERSE_FREQUENCY,
) -> GlobalWordImportance:
    """``g_w = C(w) * sum of |local value|`` over every occurrence of ``w``.

    Repeated words inside one instance count as separate occurrences, so with
    INVERSE_FREQUENCY ``g_w`` is the mean absolute value per occurrence.
    """
    scheme = WeightingScheme(scheme)
    magnitudes: dict[str, list[float]] = defaultdict(list)
    n = 0
    for inst in instances:
        n += 1
        for word, v in inst.values:
            magnitudes[word].append(abs(v))
    g = {}
    for word in sorted(magnitudes):
        if word not in counts:
            raise ValidationError(f"word {word!r} appears in the attributions but not in the corpus counts")
        total = math.fsum(magnitudes[word])
        if scheme is WeightingScheme.INVERSE_FREQUENCY:
            total /= counts[word]
        g[word] = total
    return GlobalWordImportance(g, scheme, n)


def _spread(values: Mapping[str, float], membership: TopicMembership, n_topics: int) -> list[list[float]]:
    parts: list[list[float]] = [[] for _ in range(n_topics + 1)]
    for word in sorted(values):
        v = values[word]
        weights = membership.get(word)
        if weights:
            for t, p in weights.items():
                parts[t].append(p * v)
        else:
            parts[n_topics].append(v)
    return parts


def topic_importance(
    g: GlobalWordImportance,
    membership: TopicMembership,
    model_id: str = "",
    dataset_id: str = "",
    class_label: str = "",
    config: Mapping | None = None,
) -> GlobalTopicExplanation:
    """``G_t = sum_w P(t | w) g_w``; uncovered words fill the OTHER bucket."""
    labels = _labels(membership)
    parts = _spread(g.g, membership, membership.num_topics)
    meta = ExplanationMetadata(
        model_id, dataset_id, class_label, g.scheme, membership.source, AggregationPath.GLOBAL_WORD,
        dict(config or {}),
    )
    return GlobalTopicExplanation(tuple(math.fsum(p) for p in parts), labels, meta)


def local_word_importance(instance: WordLocalValues) -> dict[str, float]:
    """Signed per-word sums within one instance."""
    acc: dict[str, list[float]] = defaultdict(list)
    for word, v in instance.values:
        acc[word].append(v)
    return {w: math.fsum(vs) for w, vs in acc.items()}


def local_topic_importance(
    local_words: Mapping[str, float],
    membership: TopicMembership,
    instance_id: str = "",
    base_value: float = 0.0,
) -> LocalTopicExplanation:
    parts = _spread(local_words, membership, membership.num_topics)
    return LocalTopicExplanation(
        instance_id, tuple(math.fsum(p) for p in parts), base_value, _labels(membership)
    )


def global_from_local(
    locals_: Sequence[LocalTopicExplanation],
    model_id: str = "",
    dataset_id: str = "",
    class_label: str = "",
    source: str = "",
    config: Mapping | None = None,
) -> GlobalTopicExplanation:
    """``G_t = sum_i |L_t^i|``."""
    if not locals_:
        raise EmptyCorpusError("no local explanations to aggregate")
    labels = locals_[0].topic_labels
    for loc in locals_:
        if loc.topic_labels != labels or len(loc.L) != len(labels):
            raise ValidationError(
                f"local explanation {loc.instance_id!r} has a different topic space"
            )
    G = tuple(math.fsum(abs(loc.L[t]) for loc in locals_) for t in range(len(labels)))
    meta = ExplanationMetadata(
        model_id, dataset_id, class_label, None, source, AggregationPath.LOCAL_ADDITIVE, dict(config or {})
    )
    return GlobalTopicExplanation(G, labels, meta)


def explain(
    instances: Sequence[InstanceAttribution],
    membership: TopicMembership,
    path: AggregationPath = AggregationPath.GLOBAL_WORD,
    scheme: WeightingScheme = WeightingScheme.INVERSE_FREQUENCY,
    model_id: str = "",
    dataset_id: str = "",
    class_label: str = "",
    config: Mapping | None = None,
) -> GlobalTopicExplanation:
    """Run the whole token -> word -> topic pipeline over ``instances``."""
    if not instances:
        raise EmptyCorpusError("no attribution instances to explain")
    words = [aggregate_tokens_to_words(inst) for inst in instances]
    path = AggregationPath(path)
    if path is AggregationPath.GLOBAL_WORD:
        _, counts = build_vocabulary(instances)
        g = global_word_importance(words, counts, scheme)
        return topic_importance(g, membership, model_id, dataset_id, class_label, config)
    locals_ = [
        local_topic_importance(local_word_importance(w), membership, inst.instance_id, inst.base_value)
        for w, inst in zip(words, instances)
    ]
    return global_from_local(locals_, model_id, dataset_id, class_label, membership.source, config)
