"""Two-slot text patterns mined from retrieval results over clean tuples.

Query the provider with both values of a clean tuple, find the places where
the two values co-occur within ``max_gap`` tokens, and count the contexts
between them.  Contexts are counted anchored to the second attribute of the
pair (the attribute whose values the pattern will later predict): every
suffix of the intervening span when that value comes second in the text,
every prefix when it comes first.  Counting sub-spans instead of whole spans
lets a shared core like "the principal of" accumulate support across
differently-phrased sentences.

Qualifying contexts (support >= the threshold) are reduced to the maximal
ones: a context contained in a longer qualifying context with the same
anchoring is redundant and dropped.

Extraction runs the mirror image: find the known value in a document, find
the context sitting against where the unknown value must be, and read the
adjacent token span through the attribute's dictionary.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .extract import Dictionary
from .providers import Query, SearchProvider
from .tabular import MISSING, Table
from .textutil import find_token_seq, tokenize

MAX_GAP = 8
"""Maximum tokens between the two attribute values of a co-occurrence."""

FORWARD = "forward"  # attr1's value precedes attr2's in the text
REVERSE = "reverse"  # attr2's value precedes attr1's


class MiningError(ValueError):
    """Pattern mining has nothing to work with."""


@dataclass(frozen=True)
class Pattern:
    attr1: str
    attr2: str
    context: tuple[str, ...]
    direction: str
    support: int

    def __post_init__(self) -> None:
        if not self.context:
            raise ValueError("pattern context must be non-empty")
        if self.direction not in (FORWARD, REVERSE):
            raise ValueError(f"bad direction {self.direction!r}")

    def to_dict(self) -> dict:
        return {
            "attr1": self.attr1,
            "attr2": self.attr2,
            "context": list(self.context),
            "direction": self.direction,
            "support": self.support,
        }


def context_supports(
    provider: SearchProvider,
    table: Table,
    attr_pair: tuple[str, str],
    sample: int,
    pages: int,
    max_gap: int = MAX_GAP,
) -> Counter:
    """Raw support counts: (context tokens, direction) -> co-occurrence count."""
    a1, a2 = attr_pair
    complete = [
        r
        for r in range(len(table.rows))
        if table.cell(r, a1) is not MISSING and table.cell(r, a2) is not MISSING
    ]
    if not complete:
        raise MiningError(f"no mining evidence: no tuple complete on ({a1}, {a2})")
    supports: Counter = Counter()
    for r in complete[:sample]:
        v1, v2 = table.cell(r, a1), table.cell(r, a2)
        docs = provider.query(Query((v1, v2), pages))
        seq1, seq2 = tokenize(v1), tokenize(v2)
        if not seq1 or not seq2:
            continue
        for doc in docs:
            tokens = tokenize(doc.text)
            for i in find_token_seq(tokens, seq1):
                for j in find_token_seq(tokens, seq2):
                    if i + len(seq1) <= j:
                        span = tokens[i + len(seq1) : j]
                        direction = FORWARD  # context is anchored at attr2: suffixes
                        anchored = [tuple(span[-n:]) for n in range(1, len(span) + 1)]
                    elif j + len(seq2) <= i:
                        span = tokens[j + len(seq2) : i]
                        direction = REVERSE  # attr2 first: prefixes
                        anchored = [tuple(span[:n]) for n in range(1, len(span) + 1)]
                    else:
                        continue  # overlapping occurrences
                    if not 1 <= len(span) <= max_gap:
                        continue
                    for ctx in anchored:
                        supports[(ctx, direction)] += 1
    return supports


def _contained(shorter: tuple[str, ...], longer: tuple[str, ...], direction: str) -> bool:
    """Anchored containment: suffix for forward patterns, prefix for reverse."""
    if len(shorter) >= len(longer):
        return False
    if direction == FORWARD:
        return longer[-len(shorter) :] == shorter
    return longer[: len(shorter)] == shorter


def mine_patterns(
    provider: SearchProvider,
    table: Table,
    attr_pair: tuple[str, str],
    min_support: int,
    sample: int = 5,
    pages: int = 5,
    max_gap: int = MAX_GAP,
) -> list[Pattern]:
    """Maximal qualifying patterns for an attribute pair.

    Pair order matters: contexts are anchored to ``attr_pair[1]``, so mine
    with the attribute to be predicted second.
    """
    if min_support < 1:
        raise ValueError(f"min_support must be >= 1, got {min_support}")
    supports = context_supports(provider, table, attr_pair, sample, pages, max_gap)
    qualifying = [
        (ctx, direction, count)
        for (ctx, direction), count in supports.items()
        if count >= min_support
    ]
    maximal = [
        (ctx, direction, count)
        for ctx, direction, count in qualifying
        if not any(
            other_dir == direction and _contained(ctx, other_ctx, direction)
            for other_ctx, other_dir, _ in qualifying
        )
    ]
    a1, a2 = attr_pair
    patterns = [
        Pattern(a1, a2, ctx, direction, count) for ctx, direction, count in maximal
    ]
    patterns.sort(key=lambda p: (-p.support, " ".join(p.context), p.direction))
    return patterns


def extract_by_pattern(
    pattern: Pattern,
    table: Table,
    row: int,
    sink: str,
    provider: SearchProvider,
    dictionary: Dictionary,
    pages: int = 5,
    max_gap: int = MAX_GAP,
) -> str | None:
    """Value for ``(row, sink)`` extracted through a mined pattern, or None.

    Queries the provider with the known value plus the context tokens, scans
    the results in rank order for the known value with the context in the
    right place, and reads the adjacent span through the dictionary.  The
    first successful dictionary match wins.
    """
    if sink == pattern.attr2:
        known_attr = pattern.attr1
    elif sink == pattern.attr1:
        known_attr = pattern.attr2
    else:
        raise ValueError(f"pattern {pattern.attr1}/{pattern.attr2} does not cover {sink}")
    known_value = table.cell(row, known_attr)
    if known_value is MISSING:
        raise ValueError(f"known attribute {known_attr} is missing in row {row}")

    known_seq = tokenize(known_value)
    ctx = list(pattern.context)
    length = len(ctx)
    if not known_seq or length > max_gap:
        return None
    slack = max_gap - length
    sink_first = (sink == pattern.attr1) == (pattern.direction == FORWARD)
    anchored_at_sink = sink == pattern.attr2

    documents = provider.query(Query((known_value, " ".join(ctx)), pages))
    for doc in sorted(documents, key=lambda d: d.rank):
        tokens = tokenize(doc.text)
        for s in find_token_seq(tokens, known_seq):
            e = s + len(known_seq)
            if anchored_at_sink and not sink_first:
                # [KNOWN] .. [ctx][SINK]: context floats, sink right after it
                for c_s in range(e, min(e + slack, len(tokens) - length) + 1):
                    if tokens[c_s : c_s + length] == ctx:
                        hit = dictionary.match_at(tokens, c_s + length)
                        if hit:
                            return hit[0]
            elif anchored_at_sink and sink_first:
                # [SINK][ctx] .. [KNOWN]: context floats, sink right before it
                for c_e in range(s, max(s - slack, length) - 1, -1):
                    if tokens[c_e - length : c_e] == ctx:
                        hit = dictionary.match_ending_at(tokens, c_e - length)
                        if hit:
                            return hit[0]
            elif sink_first:
                # [SINK] .. [ctx][KNOWN]: context glued to the known value
                c_s = s - length
                if c_s >= 0 and tokens[c_s:s] == ctx:
                    for p in range(c_s, max(c_s - slack, 0) - 1, -1):
                        hit = dictionary.match_ending_at(tokens, p)
                        if hit:
                            return hit[0]
            else:
                # [KNOWN][ctx] .. [SINK]: context glued to the known value
                if tokens[e : e + length] == ctx:
                    for p in range(e + length, min(e + length + slack, len(tokens)) + 1):
                        hit = dictionary.match_at(tokens, p)
                        if hit:
                            return hit[0]
    return None


def save_patterns(patterns: Sequence[Pattern], path: str | Path) -> None:
    data = [p.to_dict() for p in patterns]
    Path(path).write_text(
        json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def load_patterns(path: str | Path) -> list[Pattern]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [
        Pattern(
            d["attr1"], d["attr2"], tuple(d["context"]), d["direction"], int(d["support"])
        )
        for d in data
    ]
