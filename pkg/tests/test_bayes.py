import random

import pytest

from oracles import bayes_oracle, random_bayes_case
from webimpute import (
    MISSING,
    RuleSet,
    Table,
    bayes_score,
    build_dependency_graph,
    candidate_values,
    impute_internal,
    parse_rules,
)


def make_table(columns, rows):
    return Table("t", list(columns), [list(r) for r in rows])


def setup_ruleset(text, table):
    ruleset = RuleSet.estimate(parse_rules(text), table)
    return ruleset, build_dependency_graph(ruleset)


class TestCandidates:
    def test_capacity_candidates(self, nba_table, nba_ruleset):
        f1 = nba_ruleset.rule("f1")
        assert candidate_values(nba_table, "Capacity", f1) == {"7500", "6000", "18203"}

    def test_conditional_rule_restricts_candidates(self, nba_table, nba_ruleset):
        f6 = nba_ruleset.rule("f6")
        assert candidate_values(nba_table, "Team", f6) == {"Golden State Warriors"}

    def test_fully_missing_column_gives_empty_set(self):
        table = make_table(["A", "B"], [["a1", MISSING], ["a2", MISSING]])
        (rule,) = parse_rules("r: A -> B")
        assert candidate_values(table, "B", rule) == set()


class TestScore:
    def test_location_joint_is_one(self, nba_table, nba_ruleset):
        # only t1 is complete on (Location, Arena): the co-occurring value scores 1
        f1 = nba_ruleset.rule("f1")
        evidence = [("Arena", "CivicAuditorium")]
        score = bayes_score("SanFrancsicoCA", "Location", evidence, nba_table, f1)
        assert score == 1.0

    def test_never_cooccurring_value_scores_zero(self, nba_table, nba_ruleset):
        f1 = nba_ruleset.rule("f1")
        evidence = [("Arena", "CivicAuditorium")]
        assert bayes_score("18203", "Capacity", evidence, nba_table, f1) == 0.0

    def test_capacity_argmax(self, nba_table, nba_ruleset):
        f1 = nba_ruleset.rule("f1")
        evidence = [("Arena", "CivicAuditorium")]
        scores = {
            d: bayes_score(d, "Capacity", evidence, nba_table, f1)
            for d in ("7500", "6000", "18203")
        }
        assert scores["7500"] > scores["6000"] == scores["18203"] == 0.0

    def test_single_row_table(self):
        table = make_table(["A", "B"], [["a1", "b1"]])
        (rule,) = parse_rules("r: A -> B")
        assert bayes_score("b1", "B", [("A", "a1")], table, rule) == 1.0


class TestImputeInternal:
    def test_nba_worked_example(self, nba_table, nba_ruleset, nba_graph):
        filled, decisions = impute_internal(nba_table, nba_graph, nba_ruleset, 0.5)
        assert filled.cell(3, "Location") == "SanFrancsicoCA"
        assert filled.cell(3, "Capacity") == "7500"
        assert filled.cell(4, "Location") is MISSING
        assert filled.cell(4, "Capacity") is MISSING
        chosen = {(d.row, d.attr): d.chosen for d in decisions if d.chosen}
        assert chosen == {(3, "Location"): "SanFrancsicoCA", (3, "Capacity"): "7500"}

    def test_one_decision_per_missing_cell(self, nba_table, nba_ruleset, nba_graph):
        _, decisions = impute_internal(nba_table, nba_graph, nba_ruleset, 0.5)
        cells = [(d.row, d.attr) for d in decisions]
        assert sorted(cells) == sorted(nba_table.missing_cells())

    def test_complete_table_unchanged(self):
        table = make_table(["A", "B"], [["a1", "b1"], ["a2", "b2"]])
        ruleset, graph = setup_ruleset("r: A -> B", table)
        filled, decisions = impute_internal(table, graph, ruleset, 0.5)
        assert filled.rows == table.rows
        assert decisions == []

    def test_fixpoint_chains_through_fills(self):
        # C needs B, B needs A; the first sweep fills B, the second fills C
        table = make_table(
            ["A", "B", "C"],
            [["a1", "b1", "c1"], ["a1", "b1", "c1"], ["a1", MISSING, MISSING]],
        )
        ruleset, graph = setup_ruleset("r1: A -> B\nr2: B -> C", table)
        filled, decisions = impute_internal(table, graph, ruleset, 0.5)
        assert filled.cell(2, "B") == "b1"
        assert filled.cell(2, "C") == "c1"

    def test_threshold_above_best_posterior_abstains(self):
        # two candidates tie at posterior 0.5 each
        table = make_table(
            ["A", "B"],
            [["a1", "b1"], ["a1", "b2"], ["a1", MISSING]],
        )
        ruleset, graph = setup_ruleset("r: A -> B", table)
        filled, decisions = impute_internal(table, graph, ruleset, 0.9)
        assert filled.cell(2, "B") is MISSING
        (decision,) = decisions
        assert decision.chosen is None
        assert {c.value: c.posterior for c in decision.candidates} == {
            "b1": 0.5, "b2": 0.5,
        }

    def test_tie_breaks_lexicographically(self):
        table = make_table(
            ["A", "B"],
            [["a1", "b2"], ["a1", "b1"], ["a1", MISSING]],
        )
        ruleset, graph = setup_ruleset("r: A -> B", table)
        filled, _ = impute_internal(table, graph, ruleset, 0.5)
        assert filled.cell(2, "B") == "b1"

    def test_confident_unique_candidate_fills_at_k_one(self):
        table = make_table(["A", "B"], [["a1", "b1"], ["a1", MISSING]])
        ruleset, graph = setup_ruleset("r: A -> B", table)
        filled, _ = impute_internal(table, graph, ruleset, 1.0)
        assert filled.cell(1, "B") == "b1"

    def test_higher_confidence_rule_decides(self, nba_table, nba_ruleset, nba_graph):
        # t4.Team: f2 (confidence 1.0) outranks f4 (0.8) and scores everything
        # zero, so the cell abstains even though f4 alone would fill it
        filled, decisions = impute_internal(nba_table, nba_graph, nba_ruleset, 0.5)
        assert filled.cell(3, "Team") is MISSING
        team = next(d for d in decisions if (d.row, d.attr) == (3, "Team"))
        assert team.rule_id == "f2"
        assert team.chosen is None

    def test_posteriors_sum_to_one_when_scored(self, nba_table, nba_ruleset, nba_graph):
        _, decisions = impute_internal(nba_table, nba_graph, nba_ruleset, 0.5)
        for d in decisions:
            total_joint = sum(c.joint for c in d.candidates)
            if total_joint > 0:
                assert sum(c.posterior for c in d.candidates) == pytest.approx(1.0)

    def test_deterministic(self, nba_table, nba_ruleset, nba_graph):
        a = impute_internal(nba_table, nba_graph, nba_ruleset, 0.5)
        b = impute_internal(nba_table, nba_graph, nba_ruleset, 0.5)
        assert a[0].rows == b[0].rows
        assert [d.to_dict() for d in a[1]] == [d.to_dict() for d in b[1]]

    def test_bad_threshold_rejected(self, nba_table, nba_ruleset, nba_graph):
        with pytest.raises(ValueError):
            impute_internal(nba_table, nba_graph, nba_ruleset, 1.5)


def test_derived_fixture_matches_oracle():
    # 6-row, 3-attribute table with one masked cell, checked by hand-style
    # enumeration: candidates {x1, x2}, evidence (P=p1, Q=q1)
    table = make_table(
        ["P", "Q", "X"],
        [
            ["p1", "q1", "x1"],
            ["p1", "q1", "x1"],
            ["p1", "q2", "x2"],
            ["p2", "q1", "x2"],
            ["p2", "q2", "x2"],
            ["p1", "q1", MISSING],
        ],
    )
    ruleset, graph = setup_ruleset("r: P, Q -> X", table)
    filled, (decision,) = impute_internal(table, graph, ruleset, 0.5)
    assert filled.cell(5, "X") == bayes_oracle(table, ruleset, 5, "X", 0.5) == "x1"
    joints = {c.value: c.joint for c in decision.candidates}
    # by direct counting over the 5 complete rows:
    # P(x1)=2/5, P(p1|x1)=1, P(q1|x1)=1 -> 0.4
    # P(x2)=3/5, P(p1|x2)=1/3, P(q1|x2)=1/3 -> 1/15
    assert joints["x1"] == pytest.approx(0.4)
    assert joints["x2"] == pytest.approx(1 / 15)


def test_random_cases_agree_with_oracle():
    rng = random.Random(20260808)
    for _ in range(25):
        masked, ruleset, row, attr, k = random_bayes_case(rng)
        graph = build_dependency_graph(ruleset)
        filled, _ = impute_internal(masked, graph, ruleset, k, max_rounds=1)
        got = filled.cell(row, attr)
        assert got == bayes_oracle(masked, ruleset, row, attr, k)
