"""LIWC ``.dic`` style lexicons used as unweighted topics.

File layout::

    %
    1   NEGEMO
    2   ANX
    %
    afraid  1 2
    terrif* 1
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import IO, Iterable

from ..errors import ParseError, ValidationError
from ..text_core import Vocabulary, normalize_word
from .model import TopicMembership

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Lexicon:
    categories: tuple[str, ...]
    # (pattern, category indices); a trailing "*" marks a prefix pattern
    entries: tuple[tuple[str, tuple[int, ...]], ...]

    def __post_init__(self):
        if len(set(self.categories)) != len(self.categories):
            raise ValidationError("lexicon category names must be unique")
        for pattern, cats in self.entries:
            if not pattern or pattern == "*":
                raise ValidationError("empty lexicon pattern")
            if any(not 0 <= c < len(self.categories) for c in cats):
                raise ValidationError(f"pattern {pattern!r} refers to an unknown category")

    def _tables(self):
        exact: dict[str, set[int]] = {}
        prefix: dict[str, set[int]] = {}
        for pattern, cats in self.entries:
            if pattern.endswith("*"):
                prefix.setdefault(pattern[:-1], set()).update(cats)
            else:
                exact.setdefault(pattern, set()).update(cats)
        return exact, prefix

    def categories_for(self, word: str) -> set[int]:
        """Union of the categories of every pattern matching ``word``."""
        exact, prefix = self._tables()
        return _match(word, exact, prefix)

    def patterns_for(self, category: str) -> list[str]:
        c = self.categories.index(category)
        return [p for p, cats in self.entries if c in cats]


def _match(word, exact, prefix) -> set[int]:
    hit = set(exact.get(word, ()))
    for i in range(1, len(word) + 1):
        cats = prefix.get(word[:i])
        if cats:
            hit |= cats
    return hit


def _normalize_pattern(raw: str) -> str | None:
    star = raw.endswith("*")
    body = normalize_word(raw[:-1] if star else raw)
    if body is None:
        return None
    return body + "*" if star else body


def parse_lexicon(stream: IO[bytes] | IO[str] | Iterable[str], source: str | None = None) -> Lexicon:
    """Parse a lexicon; every error carries the 1-based line number.

    Word lines read category ids from the right, so multi-word phrases
    (``kind of 12``) parse, though they can never match a single word.
    """
    ids: dict[str, int] = {}
    names: list[str] = []
    entries: list[tuple[str, tuple[int, ...]]] = []
    section = 0  # 0 before header, 1 in header, 2 in word list
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        if lineno == 1:
            line = line.lstrip("\ufeff")
        text = line.strip()
        if not text:
            continue
        if text == "%":
            if section == 2:
                raise ParseError("unexpected third '%' delimiter", line=lineno, source=source)
            section += 1
            continue
        parts = text.split()
        if section == 0:
            raise ParseError("expected '%' to open the category header", line=lineno, source=source)
        if section == 1:
            if len(parts) != 2:
                raise ParseError("header lines must be '<id> <CATEGORY>'", line=lineno, source=source)
            cid, name = parts
            if cid in ids:
                raise ParseError(f"duplicate category id {cid}", line=lineno, source=source)
            if name in names:
                raise ParseError(f"duplicate category name {name}", line=lineno, source=source)
            ids[cid] = len(names)
            names.append(name)
            continue
        split = len(parts)
        while split > 1 and parts[split - 1].isdigit():
            split -= 1
        cat_ids = parts[split:]
        if not cat_ids:
            raise ParseError(f"malformed word line {text!r}: no category ids", line=lineno, source=source)
        cats = []
        for cid in cat_ids:
            if cid not in ids:
                raise ParseError(f"unknown category id {cid}", line=lineno, source=source)
            cats.append(ids[cid])
        raw_pattern = " ".join(parts[:split])
        if len(parts[:split]) > 1:
            logger.debug("line %d: phrase pattern %r cannot match single words", lineno, raw_pattern)
        pattern = _normalize_pattern(raw_pattern)
        if pattern is None:
            raise ParseError(f"pattern {raw_pattern!r} is empty after normalization", line=lineno, source=source)
        entries.append((pattern, tuple(sorted(set(cats)))))
    if section < 2:
        raise ParseError("lexicon header is not closed by '%'", source=source)
    return Lexicon(tuple(names), tuple(entries))


def load_lexicon(path) -> Lexicon:
    with open(path, "rb") as fh:
        return parse_lexicon(fh, source=str(path))


def lexicon_membership(lex: Lexicon, vocab: Vocabulary | Iterable[str]) -> TopicMembership:
    """Each matched word spreads weight ``1 / T_w`` over its ``T_w`` categories.

    Matches from every pattern are unioned; there is no longest-match rule.
    """
    exact, prefix = lex._tables()
    membership = {}
    seen = 0
    for word in vocab:
        seen += 1
        cats = _match(word, exact, prefix)
        if cats:
            share = 1.0 / len(cats)
            membership[word] = {c: share for c in sorted(cats)}
    if not membership:
        logger.warning("lexicon covers none of the %d vocabulary words", seen)
    return TopicMembership(lex.categories, membership, "LEXICON")
