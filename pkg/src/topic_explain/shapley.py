"""Desk-scale Shapley values over token-presence games.

A value function maps a presence mask (one bool per token) to a model score.
Absent tokens are dropped, not replaced: a :class:`ToyModel` simply ignores
them. User-supplied value functions should follow the same convention.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .attribution import InstanceAttribution, TokenAttribution, make_instance
from .errors import EnumerationBoundError, ValidationError
from .text_core import normalize_word

MAX_EXACT_TOKENS = 20

ValueFunction = Callable[[Sequence[bool]], float]


@dataclass(frozen=True)
class ToyModel:
    """Linear bag-of-words scorer with optional all-present interaction terms.

    ``score = bias + sum(weight[w] for present words) +
    sum(weight_I for interactions whose words are all present)``
    """

    word_weights: Mapping[str, float]
    bias: float = 0.0
    interactions: tuple[tuple[frozenset, float], ...] = ()
    model_id: str = "toy"
    class_label: str = "positive"

    @classmethod
    def from_dict(cls, doc: dict) -> "ToyModel":
        weights = {}
        for raw, w in doc.get("weights", {}).items():
            word = normalize_word(raw)
            if word is None:
                raise ValidationError(f"toy model weight key {raw!r} is empty after normalization")
            weights[word] = float(w)
        inters = []
        for item in doc.get("interactions", []):
            words = frozenset(normalize_word(w) for w in item["words"])
            if None in words or not words:
                raise ValidationError(f"bad interaction word list {item['words']!r}")
            inters.append((words, float(item["weight"])))
        return cls(
            weights,
            float(doc.get("bias", 0.0)),
            tuple(inters),
            str(doc.get("model_id", "toy")),
            str(doc.get("class_label", "positive")),
        )

    @classmethod
    def load(cls, path) -> "ToyModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def score(self, tokens: Sequence[str]) -> float:
        words = [w for w in (normalize_word(t) for t in tokens) if w is not None]
        present = set(words)
        total = [self.bias]
        total.extend(self.word_weights.get(w, 0.0) for w in words)
        total.extend(wt for ws, wt in self.interactions if ws <= present)
        return math.fsum(total)

    def value_function(self, tokens: Sequence[str]) -> ValueFunction:
        tokens = list(tokens)

        def f(mask: Sequence[bool]) -> float:
            return self.score([t for t, keep in zip(tokens, mask) if keep])

        return f

    def subset_values(self, tokens: Sequence[str]) -> np.ndarray:
        """Scores of all 2**n token subsets, indexed by bitmask (bit k = token k)."""
        n = len(tokens)
        words = [normalize_word(t) for t in tokens]
        bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
        w = np.array([self.word_weights.get(x, 0.0) if x else 0.0 for x in words])
        values = self.bias + bits @ w
        for ws, wt in self.interactions:
            # interaction fires when, for each of its words, some token carrying it is present
            fires = np.ones(1 << n, dtype=bool)
            for target in ws:
                carriers = [k for k, x in enumerate(words) if x == target]
                if not carriers:
                    fires[:] = False
                    break
                fires &= bits[:, carriers].any(axis=1)
            values = values + np.where(fires, wt, 0.0)
        return values


Model = Union[ToyModel, ValueFunction]


def _as_value_function(model: Model, tokens: Sequence[str]) -> ValueFunction:
    if isinstance(model, ToyModel):
        return model.value_function(tokens)
    return model


def _to_instance(instance_id, explained_class, base_value, tokens, phi) -> InstanceAttribution:
    toks = [TokenAttribution(t, float(v)) for t, v in zip(tokens, phi)]
    return make_instance(
        instance_id, explained_class, base_value, toks, [(None, k, k + 1) for k in range(len(toks))]
    )


def exact_shapley(
    model: Model,
    tokens: Sequence[str],
    explained_class: str,
    instance_id: str = "",
) -> InstanceAttribution:
    """Shapley values by enumerating all 2**n coalitions.

    Every token is its own player and its own word group. Raises
    :class:`EnumerationBoundError` above ``MAX_EXACT_TOKENS`` tokens.
    """
    tokens = list(tokens)
    n = len(tokens)
    if n > MAX_EXACT_TOKENS:
        raise EnumerationBoundError(
            f"{n} tokens exceeds the exact enumeration bound of {MAX_EXACT_TOKENS}; "
            "use sampled_shapley instead"
        )
    if isinstance(model, ToyModel):
        f = model.subset_values(tokens)
    else:
        masks = range(1 << n)
        f = np.array([float(model([bool(m >> k & 1) for k in range(n)])) for m in masks])
    if not np.all(np.isfinite(f)):
        raise ValidationError("value function returned a non-finite score")

    masks = np.arange(1 << n)
    sizes = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        sizes += (masks >> k) & 1
    # |S|! (n-|S|-1)! / n!
    coef = np.array(
        [math.factorial(s) * math.factorial(n - s - 1) / math.factorial(n) for s in range(n)]
    )
    phi = []
    for k in range(n):
        without = masks[((masks >> k) & 1) == 0]
        marginal = f[without | (1 << k)] - f[without]
        phi.append(math.fsum(coef[sizes[without]] * marginal))
    return _to_instance(instance_id, explained_class, float(f[0]), tokens, phi)


def sampled_shapley(
    model: Model,
    tokens: Sequence[str],
    samples: int,
    seed: int,
    explained_class: str,
    instance_id: str = "",
) -> InstanceAttribution:
    """Monte-Carlo permutation estimate of the Shapley values.

    Each sampled ordering telescopes from f(empty) to f(full), so efficiency
    holds exactly for any sample count.
    """
    if isinstance(samples, bool) or not isinstance(samples, (int, np.integer)) or samples < 1:
        raise ValidationError(f"samples must be a positive integer, got {samples!r}")
    tokens = list(tokens)
    n = len(tokens)
    f = _as_value_function(model, tokens)
    cache: dict[int, float] = {}

    def value(mask_bits: int) -> float:
        v = cache.get(mask_bits)
        if v is None:
            v = float(f([bool(mask_bits >> k & 1) for k in range(n)]))
            if not math.isfinite(v):
                raise ValidationError("value function returned a non-finite score")
            cache[mask_bits] = v
        return v

    rng = np.random.default_rng(seed)
    contrib = [[] for _ in range(n)]
    base = value(0)
    for _ in range(samples):
        mask = 0
        prev = base
        for k in rng.permutation(n):
            mask |= 1 << int(k)
            cur = value(mask)
            contrib[k].append(cur - prev)
            prev = cur
    phi = [math.fsum(c) / samples for c in contrib]
    return _to_instance(instance_id, explained_class, base, tokens, phi)

