"""Token-level attribution records, their JSONL wire format, and token->word sums."""

from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

from .errors import ParseError, ValidationError
from .text_core import PUNCT_WORD, normalize_word

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TokenAttribution:
    text: str
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValidationError(f"token {self.text!r}: score must be finite, got {self.score!r}")


@dataclass(frozen=True)
class WordGroup:
    word: str
    start: int
    end: int


@dataclass(frozen=True)
class InstanceAttribution:
    """One explained input for one output class.

    ``word_groups`` always partitions ``range(len(tokens))`` exactly; use
    :func:`make_instance` to build one from looser producer input.
    """

    instance_id: str
    class_label: str
    base_value: float
    tokens: tuple[TokenAttribution, ...]
    word_groups: tuple[WordGroup, ...]

    def __post_init__(self):
        if not math.isfinite(self.base_value):
            raise ValidationError(f"instance {self.instance_id!r}: base_value must be finite")
        pos = 0
        for g in self.word_groups:
            if g.start != pos or g.end <= g.start:
                raise ValidationError(
                    f"instance {self.instance_id!r}: word_groups do not partition the tokens "
                    f"(group {g.word!r} spans [{g.start}, {g.end}), expected start {pos})"
                )
            pos = g.end
        if pos != len(self.tokens):
            raise ValidationError(
                f"instance {self.instance_id!r}: word_groups cover {pos} of {len(self.tokens)} tokens"
            )

    @property
    def total_score(self) -> float:
        return math.fsum(t.score for t in self.tokens)


@dataclass(frozen=True)
class WordLocalValues:
    instance_id: str
    values: tuple[tuple[str, float], ...]

    @property
    def words(self) -> list[str]:
        return [w for w, _ in self.values]


def _resolve_word(word: str | None, tokens: Sequence[TokenAttribution], start: int, end: int) -> str:
    if word == PUNCT_WORD:
        return word
    if word is None:
        word = "".join(t.text for t in tokens[start:end])
    return normalize_word(word) or PUNCT_WORD


def make_instance(
    instance_id: str,
    class_label: str,
    base_value: float,
    tokens: Sequence[TokenAttribution],
    groups: Iterable[tuple[str | None, int, int]],
) -> InstanceAttribution:
    """Validate producer spans, resolve words, fill punctuation gaps.

    A gap between groups is accepted only when every token in it is pure
    punctuation; the gap becomes a ``PUNCT_WORD`` group. Any other gap, an
    overlap, or an out-of-range span raises ``ValidationError``.
    """
    tokens = tuple(tokens)
    n = len(tokens)
    resolved: list[WordGroup] = []
    pos = 0

    def fill_gap(upto: int) -> None:
        if upto <= pos:
            return
        for k in range(pos, upto):
            if normalize_word(tokens[k].text) is not None:
                raise ValidationError(
                    f"instance {instance_id!r}: gapped word_groups, token {k} ({tokens[k].text!r}) "
                    "belongs to no group"
                )
        resolved.append(WordGroup(PUNCT_WORD, pos, upto))

    for word, start, end in sorted(groups, key=lambda g: (g[1], g[2])):
        if not (0 <= start < end <= n):
            raise ValidationError(
                f"instance {instance_id!r}: span [{start}, {end}) out of range for {n} tokens"
            )
        if start < pos:
            raise ValidationError(f"instance {instance_id!r}: overlapping word_groups at token {start}")
        fill_gap(start)
        resolved.append(WordGroup(_resolve_word(word, tokens, start, end), start, end))
        pos = end
    fill_gap(n)
    return InstanceAttribution(instance_id, class_label, float(base_value), tokens, tuple(resolved))


def spans_from_offsets(text: str, offsets: Sequence[tuple[int, int]]) -> list[tuple[None, int, int]]:
    """Group subword tokens into whitespace-delimited words by character offsets.

    ``offsets[k]`` is the ``[start, end)`` character range of token ``k`` in
    ``text``. Tokens overlapping the same non-whitespace run share a group;
    whitespace-only tokens join the preceding group.
    """
    run_of: list[int] = []
    run = -1
    for i, ch in enumerate(text):
        if ch.isspace():
            run_of.append(-1)
        else:
            if i == 0 or text[i - 1].isspace():
                run += 1
            run_of.append(run)

    ids: list[int] = []
    for s, e in offsets:
        hits = [run_of[c] for c in range(s, min(e, len(text))) if run_of[c] >= 0]
        ids.append(hits[0] if hits else (ids[-1] if ids else -1))

    groups: list[tuple[None, int, int]] = []
    start = 0
    for k in range(1, len(ids) + 1):
        if k == len(ids) or ids[k] != ids[start]:
            groups.append((None, start, k))
            start = k
    return groups


def aggregate_tokens_to_words(instance: InstanceAttribution) -> WordLocalValues:
    """One signed value per word group: the sum of its token scores."""
    tokens = instance.tokens
    return WordLocalValues(
        instance.instance_id,
        tuple(
            (g.word, math.fsum(tokens[k].score for k in range(g.start, g.end)))
            for g in instance.word_groups
        ),
    )


# --- wire format ----------------------------------------------------------

def _reject_constant(name: str):
    raise ValueError(f"non-finite literal {name}")


def _require_number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"field {field!r} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"field {field!r} must be finite, got {value!r}")
    return value


def _require_str(value, field: str) -> str:
    if not isinstance(value, str):
        raise ValueError(f"field {field!r} must be a string, got {value!r}")
    return value


def _require_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"field {field!r} must be an integer, got {value!r}")
    return value


def record_to_instance(rec) -> InstanceAttribution:
    if not isinstance(rec, dict):
        raise ValueError("record must be a JSON object")
    for key in ("instance_id", "class_label", "base_value", "tokens", "word_groups"):
        if key not in rec:
            raise ValueError(f"missing field {key!r}")
    if not isinstance(rec["tokens"], list) or not isinstance(rec["word_groups"], list):
        raise ValueError("fields 'tokens' and 'word_groups' must be arrays")
    tokens = []
    for i, tok in enumerate(rec["tokens"]):
        if not isinstance(tok, dict):
            raise ValueError(f"tokens[{i}] must be an object")
        tokens.append(
            TokenAttribution(
                _require_str(tok.get("text"), f"tokens[{i}].text"),
                _require_number(tok.get("score"), f"tokens[{i}].score"),
            )
        )
    groups = []
    for i, g in enumerate(rec["word_groups"]):
        if not isinstance(g, dict):
            raise ValueError(f"word_groups[{i}] must be an object")
        word = g.get("word")
        if word is not None:
            _require_str(word, f"word_groups[{i}].word")
        groups.append(
            (
                word,
                _require_int(g.get("start"), f"word_groups[{i}].start"),
                _require_int(g.get("end"), f"word_groups[{i}].end"),
            )
        )
    return make_instance(
        _require_str(rec["instance_id"], "instance_id"),
        _require_str(rec["class_label"], "class_label"),
        _require_number(rec["base_value"], "base_value"),
        tokens,
        groups,
    )


def iter_attributions(
    stream: IO[bytes] | IO[str], lenient: bool = False, source: str | None = None
) -> Iterator[InstanceAttribution]:
    """Parse JSONL attribution records one line at a time.

    Strict mode raises :class:`ParseError` at the first bad line. With
    ``lenient=True`` bad lines are logged and skipped.
    """
    seen: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if not line.strip():
            continue
        try:
            rec = json.loads(line, parse_constant=_reject_constant)
            inst = record_to_instance(rec)
            key = (inst.instance_id, inst.class_label)
            if key in seen:
                raise ValueError(
                    f"duplicate instance_id {inst.instance_id!r} for class {inst.class_label!r}"
                )
            seen.add(key)
        except (ValueError, ValidationError) as exc:
            err = ParseError(str(exc), line=lineno, source=source)
            if not lenient:
                raise err from exc
            logger.warning("skipping %s", err)
            continue
        yield inst


def ingest_attributions(stream, lenient: bool = False, source: str | None = None) -> list[InstanceAttribution]:
    return list(iter_attributions(stream, lenient=lenient, source=source))


def load_attributions(path, lenient: bool = False) -> list[InstanceAttribution]:
    with open(path, "rb") as fh:
        return ingest_attributions(fh, lenient=lenient, source=str(path))


def instance_to_record(inst: InstanceAttribution) -> dict:
    return {
        "instance_id": inst.instance_id,
        "class_label": inst.class_label,
        "base_value": inst.base_value,
        "tokens": [{"text": t.text, "score": t.score} for t in inst.tokens],
        "word_groups": [{"word": g.word, "start": g.start, "end": g.end} for g in inst.word_groups],
    }


def dumps_attributions(instances: Iterable[InstanceAttribution]) -> str:
    buf = io.StringIO()
    for inst in instances:
        buf.write(json.dumps(instance_to_record(inst), ensure_ascii=False, allow_nan=False))
        buf.write("\n")
    return buf.getvalue()
