"""Dictionary-anchored value extraction from retrieved documents.

The pattern-free fallback path: submit the keyword group as-is and pick, out
of every dictionary entry occurring anywhere in the results, the candidate
with the smallest average token distance to the keyword values.  The sink
attribute name travels in the query but is excluded from distance anchoring;
it tends to sit in boilerplate and would drag candidates toward it.

Dictionary matching is longest-match over token sequences, compared in a
normalized form with case, punctuation and spacing removed, so the document
text "Wheaton, IL" matches the entry "WheatonIL".  Extraction always returns
a dictionary entry verbatim, never raw document text.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .providers import Document
from .tabular import MISSING, Table
from .textutil import find_token_seq, normalize, tokenize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dictionary:
    """Candidate values for one attribute, with normalized lookup forms."""

    attr: str
    entries: tuple[str, ...]

    def __post_init__(self) -> None:
        normalized: dict[str, str] = {}
        for entry in sorted(self.entries):
            key = normalize(entry)
            if key and key not in normalized:
                normalized[key] = entry
        object.__setattr__(self, "_normalized", normalized)
        object.__setattr__(
            self, "_max_len", max((len(k) for k in normalized), default=0)
        )

    def __len__(self) -> int:
        return len(self.entries)

    def match_at(self, tokens: list[str], start: int) -> tuple[str, int] | None:
        """Longest entry whose token span begins at ``start``: (entry, span length)."""
        if start < 0 or start >= len(tokens):
            return None
        concat = ""
        best = None
        for end in range(start, len(tokens)):
            concat += tokens[end]
            if len(concat) > self._max_len:
                break
            entry = self._normalized.get(concat)
            if entry is not None:
                best = (entry, end - start + 1)
        return best

    def match_ending_at(self, tokens: list[str], end: int) -> tuple[str, int] | None:
        """Longest entry whose token span ends just before index ``end``."""
        if end <= 0 or end > len(tokens):
            return None
        concat = ""
        best = None
        for start in range(end - 1, -1, -1):
            concat = tokens[start] + concat
            if len(concat) > self._max_len:
                break
            entry = self._normalized.get(concat)
            if entry is not None:
                best = (entry, end - start)
        return best

    def occurrences(self, tokens: list[str]) -> list[tuple[int, str]]:
        """(position, entry) for the longest match starting at each position."""
        hits = []
        for i in range(len(tokens)):
            match = self.match_at(tokens, i)
            if match is not None:
                hits.append((i, match[0]))
        return hits


def build_dictionary(
    table: Table, attr: str, extra: str | Path | None = None
) -> Dictionary:
    """Distinct present values of ``attr`` plus entries from an optional file.

    The supplementary file holds one value per line and stands in for
    candidate values harvested outside the table.
    """
    col = table.column_index(attr)
    values = {row[col] for row in table.rows if row[col] is not MISSING}
    if extra is not None:
        for line in Path(extra).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line:
                values.add(line)
    if not values:
        log.warning("dictionary for %r is empty", attr)
    return Dictionary(attr, tuple(sorted(values)))


def avg_distance(
    candidate_pos: int, keyword_positions: dict[str, list[int]]
) -> float:
    """Mean over present keywords of the minimum token-index gap.

    Returns +inf when no keyword occurs, so the document contributes no
    candidates.
    """
    gaps = [
        min(abs(candidate_pos - p) for p in positions)
        for positions in keyword_positions.values()
        if positions
    ]
    if not gaps:
        return float("inf")
    return sum(gaps) / len(gaps)


def extract_by_keywords(
    documents: list[Document],
    keywords: list[str],
    dictionary: Dictionary,
) -> str | None:
    """Minimum-average-distance dictionary candidate across all documents.

    ``keywords`` come from keyword-group rendering, so the final element is
    the sink attribute name and only the preceding value keywords anchor
    distances.  Ties prefer lower document rank, then earlier position, then
    the lexicographically smaller value.  Returns None when no dictionary
    entry occurs in any document.
    """
    if not dictionary.entries:
        log.warning("empty dictionary for %r: nothing to extract", dictionary.attr)
        return None
    anchors = [kw for kw in keywords[:-1] if kw]
    best: tuple[float, int, int, str] | None = None
    for doc in sorted(documents, key=lambda d: d.rank):
        tokens = tokenize(doc.text)
        positions = {}
        for anchor in anchors:
            seq = tokenize(anchor)
            hits = find_token_seq(tokens, seq) if seq else []
            if hits:
                positions[anchor] = hits
        if not positions:
            continue
        for pos, entry in dictionary.occurrences(tokens):
            candidate = (avg_distance(pos, positions), doc.rank, pos, entry)
            if best is None or candidate < best:
                best = candidate
    return best[3] if best is not None else None
