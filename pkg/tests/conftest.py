from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from webimpute import (
    LocalCorpusProvider,
    RuleSet,
    RunConfig,
    Table,
    build_dependency_graph,
    load_table,
    parse_rules_file,
)

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def nba_table() -> Table:
    return load_table(DATA / "nba.csv")


@pytest.fixture
def nba_ruleset(nba_table) -> RuleSet:
    return RuleSet.estimate(parse_rules_file(DATA / "nba.rules"), nba_table)


@pytest.fixture
def nba_graph(nba_ruleset):
    return build_dependency_graph(nba_ruleset)


@pytest.fixture
def nba_provider() -> LocalCorpusProvider:
    return LocalCorpusProvider.from_jsonl(DATA / "nba_corpus.jsonl")


@pytest.fixture
def nba_config() -> RunConfig:
    return RunConfig(
        bayes_threshold=0.5,
        group_threshold=0.8,
        pattern_support=2,
        pages=5,
        sample=5,
        dictionaries={"Location": str(DATA / "nba_location.dict")},
    )
