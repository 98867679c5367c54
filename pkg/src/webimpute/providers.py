"""Retrieval interface: keywords and a page budget in, ranked documents out.

Two providers share one contract.  :class:`LocalCorpusProvider` serves a
JSON-Lines corpus deterministically and is what tests and experiments run
against; :class:`HttpProvider` is a thin live HTTP client (one GET per page,
tags stripped, no engine-specific parsing) whose failures surface as
:class:`ProviderError` so a pipeline can record the cell as unfilled instead
of crashing.
"""

from __future__ import annotations

import html
import json
import re
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

from .textutil import contains_token_seq, tokenize

PAGE_SIZE = 10
"""Default number of documents per result page."""


class ProviderError(RuntimeError):
    """Retryable retrieval failure (network, HTTP status, rate limit)."""


@dataclass(frozen=True)
class Query:
    keywords: tuple[str, ...]
    pages: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "keywords", tuple(self.keywords))
        if not self.keywords:
            raise ValueError("query needs at least one keyword")
        if self.pages < 1:
            raise ValueError(f"pages must be >= 1, got {self.pages}")


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    rank: int
    score: float


class SearchProvider(Protocol):  # pragma: no cover - structural type only
    def query(self, q: Query) -> list[Document]: ...


def load_corpus(path: str | Path) -> list[tuple[str, str]]:
    """Read a JSON-Lines corpus: one {"id": ..., "text": ...} object per line."""
    docs = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            docs.append((str(obj["id"]), str(obj["text"])))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"{path}: bad corpus line {lineno}: {exc}") from None
    return docs


class LocalCorpusProvider:
    """Deterministic retrieval over an in-memory corpus.

    A document's score is the number of distinct case-folded query keywords
    whose token sequence occurs in it; zero-score documents are excluded and
    ties break on the document id.  Results are a pure function of
    (corpus, query), and growing the page budget only extends the list.
    """

    def __init__(self, docs: Iterable[tuple[str, str]], page_size: int = PAGE_SIZE):
        self.docs = list(docs)
        self.page_size = page_size
        self._tokens = [(doc_id, text, tokenize(text)) for doc_id, text in self.docs]

    @classmethod
    def from_jsonl(cls, path: str | Path, page_size: int = PAGE_SIZE) -> "LocalCorpusProvider":
        return cls(load_corpus(path), page_size=page_size)

    def query(self, q: Query) -> list[Document]:
        needles = []
        seen = set()
        for kw in q.keywords:
            seq = tuple(tokenize(kw))
            if seq and seq not in seen:
                seen.add(seq)
                needles.append(list(seq))
        scored = []
        for doc_id, text, tokens in self._tokens:
            score = sum(1 for n in needles if contains_token_seq(tokens, n))
            if score > 0:
                scored.append((-score, doc_id, text, score))
        scored.sort()
        limit = q.pages * self.page_size
        return [
            Document(doc_id, text, rank, float(score))
            for rank, (_, doc_id, text, score) in enumerate(scored[:limit])
        ]


_TAG_RE = re.compile(r"<[^>]*>")


def strip_tags(markup: str) -> str:
    return html.unescape(_TAG_RE.sub(" ", markup))


class HttpProvider:
    """Generic live search over a URL template with a ``{query}`` placeholder.

    One request per page (an optional ``{page}`` placeholder receives the
    1-based page number); each stripped response page becomes one document.
    Intentionally engine-agnostic: no result parsing beyond tag stripping.
    """

    def __init__(
        self,
        url_template: str,
        delay_ms: int = 1000,
        user_agent: str = "webimpute/0.1",
        timeout_ms: int = 10000,
    ):
        if "{query}" not in url_template:
            raise ValueError("url_template must contain a {query} placeholder")
        self.url_template = url_template
        self.delay_ms = delay_ms
        self.user_agent = user_agent
        self.timeout_ms = timeout_ms
        self._lock = threading.Lock()

    def query(self, q: Query) -> list[Document]:
        encoded = urllib.parse.quote_plus(" ".join(q.keywords))
        out = []
        for page in range(1, q.pages + 1):
            url = self.url_template.replace("{query}", encoded).replace(
                "{page}", str(page)
            )
            request = urllib.request.Request(url, headers={"User-Agent": self.user_agent})
            with self._lock:
                if page > 1 and self.delay_ms:
                    time.sleep(self.delay_ms / 1000.0)
                try:
                    with urllib.request.urlopen(
                        request, timeout=self.timeout_ms / 1000.0
                    ) as resp:
                        body = resp.read().decode("utf-8", errors="replace")
                except (urllib.error.URLError, OSError, ValueError) as exc:
                    raise ProviderError(f"GET {url} failed: {exc}") from exc
            rank = page - 1
            out.append(Document(url, strip_tags(body), rank, 1.0 / (1 + rank)))
        return out
