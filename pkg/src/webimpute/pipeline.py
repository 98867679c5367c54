"""End-to-end imputation: internal pass, then per-cell web extraction.

Phase 1 fills what the table's own dependencies can justify.  Phase 2 walks
the remaining missing cells in row-major order: select the optimal keyword
group (abstain if its weight is below the group threshold), try mined
patterns for the group's (source, sink) attribute pairs, and fall back to
keyword-group extraction when no pattern produces a value.  Every phase-2
cell is evaluated against the phase-1 snapshot and fills are applied
afterwards in row-major order, so results are independent of query
scheduling; provider failures mark the cell abstained and never abort a run.
"""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .bayes import BayesDecision, impute_internal
from .depgraph import build_dependency_graph
from .extract import Dictionary, build_dictionary, extract_by_keywords
from .keywords import KeywordGroup, enumerate_single_sink_graphs, select_optimal
from .patterns import (
    MAX_GAP,
    MiningError,
    Pattern,
    extract_by_pattern,
    load_patterns,
    mine_patterns,
    save_patterns,
)
from .providers import ProviderError, Query, SearchProvider
from .rules import RuleSet
from .tabular import Table

log = logging.getLogger(__name__)

FILLED_INTERNAL = "filled-internal"
FILLED_PATTERN = "filled-pattern"
FILLED_KEYWORD = "filled-keyword"
ABSTAINED = "abstained"


@dataclass
class RunConfig:
    """Thresholds and knobs for one imputation run."""

    bayes_threshold: float = 0.5   # min posterior for an internal fill
    group_threshold: float = 0.8   # min keyword-group weight
    pattern_support: int | None = None  # None: half the per-query document budget
    pages: int = 5
    sample: int = 5                # clean tuples mined per attribute pair
    max_rounds: int = 10
    max_concurrent_queries: int = 4
    max_gap: int = MAX_GAP
    page_size: int = 10
    query_retries: int = 2         # extra attempts after a retryable failure
    dictionaries: dict[str, str] = field(default_factory=dict)  # attr -> extra file
    pattern_cache: str | None = None
    reiterate: bool = False
    # provider choice + settings, e.g. {"kind": "local", "corpus": "c.jsonl"} or
    # {"kind": "http", "url_template": "...", "delay_ms": 1000}
    provider: dict | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.bayes_threshold <= 1.0:
            raise ValueError("bayes_threshold must be in [0,1]")
        if not 0.0 <= self.group_threshold <= 1.0:
            raise ValueError("group_threshold must be in [0,1]")
        if self.pattern_support is not None and self.pattern_support < 1:
            raise ValueError("pattern_support must be >= 1")
        if self.pages < 1:
            raise ValueError("pages must be >= 1")
        if self.sample < 1:
            raise ValueError("sample must be >= 1")
        if self.max_concurrent_queries < 1:
            raise ValueError("max_concurrent_queries must be >= 1")
        if self.query_retries < 0:
            raise ValueError("query_retries must be >= 0")

    @property
    def effective_pattern_support(self) -> int:
        if self.pattern_support is not None:
            return self.pattern_support
        return max(1, math.ceil(0.5 * self.pages * self.page_size))

    def to_dict(self) -> dict:
        return {
            "bayes_threshold": self.bayes_threshold,
            "group_threshold": self.group_threshold,
            "pattern_support": self.pattern_support,
            "pages": self.pages,
            "sample": self.sample,
            "max_rounds": self.max_rounds,
            "max_concurrent_queries": self.max_concurrent_queries,
            "max_gap": self.max_gap,
            "page_size": self.page_size,
            "query_retries": self.query_retries,
            "dictionaries": dict(self.dictionaries),
            "pattern_cache": self.pattern_cache,
            "reiterate": self.reiterate,
            "provider": self.provider,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass
class CellOutcome:
    row: int
    attr: str
    outcome: str
    value: str | None = None
    reason: str | None = None
    keyword_group: list[str] | None = None
    group_weight: float | None = None
    pattern: dict | None = None
    alternatives: list[dict] | None = None

    def to_dict(self) -> dict:
        return {
            "row": self.row,
            "attr": self.attr,
            "outcome": self.outcome,
            "value": self.value,
            "reason": self.reason,
            "keyword_group": self.keyword_group,
            "group_weight": self.group_weight,
            "pattern": self.pattern,
            "alternatives": self.alternatives,
        }


@dataclass
class RunReport:
    table_name: str
    initial_missing: int
    outcomes: list[CellOutcome]
    internal_decisions: list[BayesDecision]
    config: dict
    timings: dict[str, float]

    @property
    def counts(self) -> dict[str, int]:
        counts = {
            FILLED_INTERNAL: 0,
            FILLED_PATTERN: 0,
            FILLED_KEYWORD: 0,
            ABSTAINED: 0,
        }
        for outcome in self.outcomes:
            counts[outcome.outcome] += 1
        return counts

    def to_dict(self, include_timings: bool = True) -> dict:
        data = {
            "table": self.table_name,
            "initial_missing": self.initial_missing,
            "counts": self.counts,
            "outcomes": [o.to_dict() for o in self.outcomes],
            "internal_decisions": [d.to_dict() for d in self.internal_decisions],
            "config": self.config,
        }
        if include_timings:
            data["timings"] = self.timings
        return data

    def to_json(self, include_timings: bool = True) -> str:
        return (
            json.dumps(
                self.to_dict(include_timings),
                indent=2,
                sort_keys=True,
                ensure_ascii=False,
            )
            + "\n"
        )

    def write(self, path: str | Path, include_timings: bool = True) -> None:
        Path(path).write_text(self.to_json(include_timings), encoding="utf-8")


class _RetryingProvider:
    """Gives a provider's retryable failures a few more attempts."""

    def __init__(self, provider: SearchProvider, retries: int):
        self._provider = provider
        self._retries = retries

    def query(self, q: Query) -> list:
        last: ProviderError | None = None
        for _ in range(self._retries + 1):
            try:
                return self._provider.query(q)
            except ProviderError as exc:
                last = exc
        raise last


def _mine_needed_patterns(
    pairs: list[tuple[str, str]],
    table: Table,
    provider: SearchProvider,
    config: RunConfig,
) -> dict[tuple[str, str], list[Pattern]]:
    cache_path = Path(config.pattern_cache) if config.pattern_cache else None
    mined: dict[tuple[str, str], list[Pattern]] = {}
    if cache_path is not None and cache_path.exists():
        for pattern in load_patterns(cache_path):
            mined.setdefault((pattern.attr1, pattern.attr2), []).append(pattern)
        log.info("loaded %d cached pattern pairs from %s", len(mined), cache_path)
    for pair in pairs:
        if pair in mined:
            continue
        try:
            mined[pair] = mine_patterns(
                provider,
                table,
                pair,
                min_support=config.effective_pattern_support,
                sample=config.sample,
                pages=config.pages,
                max_gap=config.max_gap,
            )
        except MiningError:
            mined[pair] = []
        except ProviderError as exc:
            log.warning("pattern mining for %s failed: %s", pair, exc)
            mined[pair] = []
    if cache_path is not None:
        flat = [p for patterns in mined.values() for p in patterns]
        flat.sort(key=lambda p: (p.attr1, p.attr2, -p.support, " ".join(p.context)))
        save_patterns(flat, cache_path)
    return mined


def _extract_cell(
    cell: tuple[int, str],
    group: KeywordGroup,
    table: Table,
    provider: SearchProvider,
    config: RunConfig,
    patterns: dict[tuple[str, str], list[Pattern]],
    dictionary: Dictionary,
) -> CellOutcome:
    row, attr = cell
    base = dict(
        row=row,
        attr=attr,
        keyword_group=list(group.keywords),
        group_weight=group.weight,
    )
    try:
        for source in group.graph.source_attrs:
            for pattern in patterns.get((source, attr), ()):
                value = extract_by_pattern(
                    pattern,
                    table,
                    row,
                    attr,
                    provider,
                    dictionary,
                    pages=config.pages,
                    max_gap=config.max_gap,
                )
                if value is not None:
                    return CellOutcome(
                        outcome=FILLED_PATTERN,
                        value=value,
                        pattern=pattern.to_dict(),
                        **base,
                    )
        documents = provider.query(Query(tuple(group.keywords), config.pages))
        value = extract_by_keywords(documents, list(group.keywords), dictionary)
        if value is not None:
            return CellOutcome(outcome=FILLED_KEYWORD, value=value, **base)
        return CellOutcome(outcome=ABSTAINED, reason="no extraction", **base)
    except ProviderError as exc:
        log.warning("provider failed for cell (%d, %s): %s", row, attr, exc)
        return CellOutcome(outcome=ABSTAINED, reason="provider error", **base)


def impute(
    table: Table,
    ruleset: RuleSet,
    config: RunConfig,
    provider: SearchProvider,
) -> tuple[Table, RunReport]:
    """Run the full flow and report one outcome per initially-missing cell."""
    missing_refs = ruleset.referenced_attrs() - set(table.columns)
    if missing_refs:
        raise ValueError(
            f"rules reference attributes not in table: {', '.join(sorted(missing_refs))}"
        )
    t_start = time.perf_counter()
    initial_missing = list(table.missing_cells())
    provider = _RetryingProvider(provider, config.query_retries)

    graph = build_dependency_graph(ruleset)
    internal_table, decisions = impute_internal(
        table, graph, ruleset, config.bayes_threshold, config.max_rounds
    )
    t_internal = time.perf_counter()

    outcomes: dict[tuple[int, str], CellOutcome] = {}
    for decision in decisions:
        if decision.chosen is not None:
            outcomes[(decision.row, decision.attr)] = CellOutcome(
                decision.row, decision.attr, FILLED_INTERNAL, value=decision.chosen
            )

    # Keyword planning against the phase-1 snapshot.
    remaining = [c for c in initial_missing if c not in outcomes]
    plans: dict[tuple[int, str], KeywordGroup] = {}
    for row, attr in remaining:
        graphs = enumerate_single_sink_graphs(graph, internal_table, row, attr)
        group = select_optimal(graphs, config.group_threshold)
        alternatives = [
            {"weight": g.weight, "attrs": list(g.attrs)} for g in graphs[:8]
        ]
        if group is None:
            reason = "below K" if graphs else "no feasible keyword group"
            outcomes[(row, attr)] = CellOutcome(
                row, attr, ABSTAINED, reason=reason, alternatives=alternatives
            )
        else:
            plans[(row, attr)] = group
            outcomes[(row, attr)] = CellOutcome(  # placeholder, replaced below
                row, attr, ABSTAINED, reason="pending", alternatives=alternatives
            )

    needed_pairs: list[tuple[str, str]] = []
    for cell, group in plans.items():
        for source in group.graph.source_attrs:
            pair = (source, cell[1])
            if pair not in needed_pairs:
                needed_pairs.append(pair)
    needed_pairs.sort()
    mined = _mine_needed_patterns(needed_pairs, internal_table, provider, config)

    dictionaries: dict[str, Dictionary] = {}
    for _, attr in plans:
        if attr not in dictionaries:
            dictionaries[attr] = build_dictionary(
                internal_table, attr, config.dictionaries.get(attr)
            )

    cells = sorted(plans)

    def run_cell(cell: tuple[int, str]) -> CellOutcome:
        return _extract_cell(
            cell, plans[cell], internal_table, provider, config,
            mined, dictionaries[cell[1]],
        )

    if config.max_concurrent_queries > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=config.max_concurrent_queries) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(cell) for cell in cells]

    final = internal_table
    for cell, outcome in zip(cells, results):
        outcome.alternatives = outcomes[cell].alternatives
        outcomes[cell] = outcome
        if outcome.value is not None:
            final = final.with_cell(outcome.row, outcome.attr, outcome.value)

    if config.reiterate:
        refilled, extra_decisions = impute_internal(
            final, graph, ruleset, config.bayes_threshold, max_rounds=1
        )
        for decision in extra_decisions:
            if decision.chosen is not None:
                final = refilled
                outcomes[(decision.row, decision.attr)] = CellOutcome(
                    decision.row,
                    decision.attr,
                    FILLED_INTERNAL,
                    value=decision.chosen,
                    reason="reiterate",
                )
                decisions.append(decision)

    t_end = time.perf_counter()
    ordered = [outcomes[cell] for cell in initial_missing]
    report = RunReport(
        table_name=table.name,
        initial_missing=len(initial_missing),
        outcomes=ordered,
        internal_decisions=decisions,
        config=config.to_dict(),
        timings={
            "internal_s": t_internal - t_start,
            "web_s": t_end - t_internal,
            "total_s": t_end - t_start,
        },
    )
    return final, report
