"""Tokenization and token-sequence matching shared by the text subsystems."""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Case-folded word tokens: maximal runs of word characters."""
    return [t.casefold() for t in _TOKEN_RE.findall(text)]


def normalize(text: str) -> str:
    """Concatenated token form: case-folded, punctuation and spaces dropped.

    "Wheaton, IL" and "WheatonIL" normalize to the same string, which is
    what dictionary matching relies on.
    """
    return "".join(tokenize(text))


def find_token_seq(haystack: list[str], needle: list[str]) -> list[int]:
    """Start indices of every occurrence of ``needle`` in ``haystack``."""
    n = len(needle)
    if n == 0 or n > len(haystack):
        return []
    first = needle[0]
    return [
        i
        for i in range(len(haystack) - n + 1)
        if haystack[i] == first and haystack[i : i + n] == needle
    ]


def contains_token_seq(haystack: list[str], needle: list[str]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    first = needle[0]
    for i in range(len(haystack) - n + 1):
        if haystack[i] == first and haystack[i : i + n] == needle:
            return True
    return False
