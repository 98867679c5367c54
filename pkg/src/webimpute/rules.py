"""Dependency rules: a small text DSL plus confidence measurement.

A rule is a functional dependency, optionally restricted by constant
equality conditions::

    f1: Arena -> Location, Capacity
    f4: Arena -> Team @ 0.8
    f6: [Coach=A.Hannum], Start-End -> Team

One rule per line, ``#`` starts a comment, attribute names (and condition
literals) may be double-quoted to include commas or spaces.  The optional
``@`` clause declares a confidence in (0, 1] that overrides measurement.

Confidence is measured per (rule, RHS attribute) edge as the plurality
ratio: restrict to tuples that satisfy the condition and are complete on
condition + LHS + that RHS attribute, group them by LHS values, and count
the largest consistent subset per group.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .tabular import MISSING, Table

log = logging.getLogger(__name__)


class RuleParseError(ValueError):
    """Syntax or validity error in the rule DSL, with a line number."""


class RuleError(ValueError):
    """A rule cannot be applied to the given table."""


@dataclass(frozen=True)
class Rule:
    """One dependency: ``condition, lhs -> rhs`` with an optional declared confidence."""

    id: str
    condition: tuple[tuple[str, str], ...]  # (attr, literal) equality constraints
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]
    declared_confidence: float | None = None

    def __post_init__(self) -> None:
        if not self.lhs:
            raise RuleParseError(f"rule {self.id}: empty LHS")
        if not self.rhs:
            raise RuleParseError(f"rule {self.id}: empty RHS")
        both = set(self.lhs) & set(self.rhs)
        if both:
            raise RuleParseError(
                f"rule {self.id}: attribute on both sides: {', '.join(sorted(both))}"
            )
        cond_in_rhs = {a for a, _ in self.condition} & set(self.rhs)
        if cond_in_rhs:
            raise RuleParseError(
                f"rule {self.id}: condition attribute in RHS: "
                f"{', '.join(sorted(cond_in_rhs))}"
            )
        if self.declared_confidence is not None and not (
            0.0 < self.declared_confidence <= 1.0
        ):
            raise RuleParseError(
                f"rule {self.id}: declared confidence must be in (0,1], "
                f"got {self.declared_confidence}"
            )

    @property
    def condition_attrs(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.condition)

    def referenced_attrs(self) -> set[str]:
        return set(self.lhs) | set(self.rhs) | set(self.condition_attrs)

    def condition_holds(self, table: Table, row: int) -> bool:
        """True when the row satisfies every condition literal (values present)."""
        return all(table.cell(row, a) == lit for a, lit in self.condition)


def _split_top(text: str, sep: str) -> list[str]:
    """Split on ``sep`` outside double quotes and square brackets."""
    parts, buf, depth, quoted = [], [], 0, False
    for ch in text:
        if ch == '"':
            quoted = not quoted
            buf.append(ch)
        elif quoted:
            buf.append(ch)
        elif ch == "[":
            depth += 1
            buf.append(ch)
        elif ch == "]":
            depth -= 1
            buf.append(ch)
        elif ch == sep and depth == 0:
            parts.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    parts.append("".join(buf))
    return parts


def _unquote(item: str) -> str:
    item = item.strip()
    if len(item) >= 2 and item[0] == '"' and item[-1] == '"':
        return item[1:-1]
    return item


def _strip_comment(line: str) -> str:
    quoted = False
    for i, ch in enumerate(line):
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            return line[:i]
    return line


def _find_unquoted(text: str, needle: str, last: bool = False) -> int:
    """Index of ``needle`` outside double quotes, or -1."""
    quoted = False
    found = -1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == '"':
            quoted = not quoted
        elif not quoted and text.startswith(needle, i):
            if not last:
                return i
            found = i
        i += 1
    return found


def _parse_condition(block: str, where: str) -> tuple[tuple[str, str], ...]:
    inner = block.strip()[1:-1]
    literals = []
    for part in _split_top(inner, ","):
        part = part.strip()
        if not part or part == "_":
            continue  # wildcard position: no constraint
        if "=" not in part:
            raise RuleParseError(f"{where}: condition literal needs Attr=Value: {part!r}")
        attr, _, value = part.partition("=")
        attr, value = _unquote(attr), _unquote(value)
        if not attr or not value:
            raise RuleParseError(f"{where}: malformed condition literal: {part!r}")
        literals.append((attr, value))
    return tuple(literals)


def parse_rules(text: str) -> list[Rule]:
    """Parse the rule DSL; one :class:`Rule` per non-comment line."""
    rules: list[Rule] = []
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        where = f"line {lineno}"
        head, colon, body = line.partition(":")
        if not colon or not head.strip():
            raise RuleParseError(f"{where}: expected 'id: ... -> ...'")
        rule_id = head.strip()
        if rule_id in seen_ids:
            raise RuleParseError(f"{where}: duplicate rule id {rule_id!r}")

        confidence = None
        at = _find_unquoted(body, "@", last=True)
        if at >= 0:
            conf_text = body[at + 1 :].strip()
            body = body[:at]
            try:
                confidence = float(conf_text)
            except ValueError:
                raise RuleParseError(f"{where}: bad confidence {conf_text!r}") from None

        arrow = _find_unquoted(body, "->")
        if arrow < 0 or _find_unquoted(body[arrow + 2 :], "->") >= 0:
            raise RuleParseError(f"{where}: expected exactly one '->'")
        left, right = body[:arrow], body[arrow + 2 :]

        condition: tuple[tuple[str, str], ...] = ()
        lhs: list[str] = []
        for item in _split_top(left, ","):
            item = item.strip()
            if not item:
                continue
            if item.startswith("["):
                if not item.endswith("]"):
                    raise RuleParseError(f"{where}: unclosed condition block")
                if condition:
                    raise RuleParseError(f"{where}: more than one condition block")
                condition = _parse_condition(item, where)
            else:
                lhs.append(_unquote(item))
        rhs = [_unquote(i) for i in _split_top(right, ",") if i.strip()]

        try:
            rule = Rule(rule_id, condition, tuple(lhs), tuple(rhs), confidence)
        except RuleParseError as exc:
            raise RuleParseError(f"{where}: {exc}") from None
        rules.append(rule)
        seen_ids.add(rule_id)
    return rules


def parse_rules_file(path: str | Path) -> list[Rule]:
    return parse_rules(Path(path).read_text(encoding="utf-8"))


def estimate_confidence(rule: Rule, table: Table) -> dict[str, float]:
    """Measured (or declared) confidence for each RHS attribute of a rule."""
    missing_attrs = rule.referenced_attrs() - set(table.columns)
    if missing_attrs:
        raise RuleError(
            f"rule {rule.id} references attributes not in table "
            f"{table.name!r}: {', '.join(sorted(missing_attrs))}"
        )
    result: dict[str, float] = {}
    for attr in rule.rhs:
        if rule.declared_confidence is not None:
            result[attr] = rule.declared_confidence
            continue
        needed = list(rule.condition_attrs) + list(rule.lhs) + [attr]
        groups: dict[tuple, dict[str, int]] = {}
        total = 0
        for r in range(len(table.rows)):
            if any(table.cell(r, a) is MISSING for a in needed):
                continue
            if not rule.condition_holds(table, r):
                continue
            total += 1
            key = tuple(table.cell(r, a) for a in rule.lhs)
            counts = groups.setdefault(key, {})
            value = table.cell(r, attr)
            counts[value] = counts.get(value, 0) + 1
        if total == 0:
            log.warning(
                "rule %s: no tuples satisfy the condition and are complete on "
                "%s; confidence(%s) = 0",
                rule.id,
                needed,
                attr,
            )
            result[attr] = 0.0
        else:
            support = sum(max(counts.values()) for counts in groups.values())
            result[attr] = support / total
    return result


@dataclass
class RuleSet:
    """Rules plus one confidence per (rule id, RHS attribute) edge."""

    rules: list[Rule]
    confidences: dict[tuple[str, str], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise RuleParseError("duplicate rule ids in rule set")
        self._by_id = {r.id: r for r in self.rules}

    @classmethod
    def estimate(cls, rules: Sequence[Rule], table: Table) -> "RuleSet":
        """Build a rule set with confidences measured against ``table``."""
        confidences = {}
        for rule in rules:
            for attr, conf in estimate_confidence(rule, table).items():
                confidences[(rule.id, attr)] = conf
        return cls(list(rules), confidences)

    def rule(self, rule_id: str) -> Rule:
        return self._by_id[rule_id]

    def confidence(self, rule_id: str, attr: str) -> float:
        return self.confidences[(rule_id, attr)]

    def rules_into(self, attr: str) -> list[Rule]:
        """Rules whose RHS contains ``attr``, in declaration order."""
        return [r for r in self.rules if attr in r.rhs]

    def referenced_attrs(self) -> set[str]:
        out: set[str] = set()
        for r in self.rules:
            out |= r.referenced_attrs()
        return out
