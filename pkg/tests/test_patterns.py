import random

import pytest

from webimpute import (
    Dictionary,
    LocalCorpusProvider,
    Pattern,
    Table,
    extract_by_pattern,
    load_patterns,
    mine_patterns,
    save_patterns,
)
from webimpute.patterns import FORWARD, REVERSE, MiningError, context_supports
from webimpute.tabular import MISSING


def make_table(columns, rows):
    return Table("t", list(columns), [list(r) for r in rows])


@pytest.fixture
def principal_fixture():
    table = make_table(
        ["principal", "university"],
        [
            ["YuZhou", "Harbin Institute Of technology"],
            ["YongQiu", "Tsinghua University"],
            ["Enge Wang", "Peking University"],
        ],
    )
    provider = LocalCorpusProvider(
        [
            ("s1", "YuZhou is the principal of Harbin Institute Of technology"),
            ("s2", "YongQiu is the present principal of Tsinghua University"),
            ("s3", "Enge Wang served as the principal of Peking University"),
        ]
    )
    return table, provider


@pytest.fixture
def film_fixture():
    films = [
        ("The Shawshank Redemption", "Frank Darabont"),
        ("The Godfather", "Francis Ford Coppola"),
        ("Pulp Fiction", "Quentin Tarantino"),
        ("Schindler's List", "Steven Allan Spielberg"),
        ("Fight Club", "David Fincher"),
        ("One Flew Over the Cuckoo's Nest", "Milos Forman"),
        ("Inception", "Christopher Nolan"),
    ]
    table = make_table(["Film", "Director"], [list(f) for f in films])
    provider = LocalCorpusProvider(
        [(f"f{i}", f"{film} director {director}.") for i, (film, director) in enumerate(films)]
    )
    return table, provider


class TestMine:
    def test_principal_pattern_is_exactly_one(self, principal_fixture):
        table, provider = principal_fixture
        patterns = mine_patterns(
            provider, table, ("principal", "university"), min_support=2
        )
        assert len(patterns) == 1
        (p,) = patterns
        assert p.context == ("the", "principal", "of")
        assert p.direction == FORWARD
        assert p.support == 2

    def test_film_pattern(self, film_fixture):
        table, provider = film_fixture
        patterns = mine_patterns(provider, table, ("Film", "Director"),
                                 min_support=5, sample=7)
        assert [p.context for p in patterns] == [("director",)]
        assert patterns[0].support == 7
        assert patterns[0].direction == FORWARD

    def test_values_never_cooccurring(self):
        table = make_table(["A", "B"], [["alpha", "beta"]])
        provider = LocalCorpusProvider([("d1", "alpha alone"), ("d2", "beta alone")])
        assert mine_patterns(provider, table, ("A", "B"), min_support=1) == []

    def test_no_complete_tuples_is_an_error(self):
        table = make_table(["A", "B"], [["alpha", MISSING]])
        provider = LocalCorpusProvider([])
        with pytest.raises(MiningError, match="no mining evidence"):
            mine_patterns(provider, table, ("A", "B"), min_support=1)

    def test_cooccurrence_beyond_max_gap_ignored(self):
        table = make_table(["A", "B"], [["alpha", "omega"]])
        filler = " ".join(f"w{i}" for i in range(9))
        provider = LocalCorpusProvider([("d", f"alpha {filler} omega")])
        assert mine_patterns(provider, table, ("A", "B"), min_support=1) == []
        near = LocalCorpusProvider([("d", "alpha linked to omega")])
        assert mine_patterns(near, table, ("A", "B"), min_support=1)

    def test_reverse_direction(self):
        table = make_table(["A", "B"], [["alpha", "beta"], ["gamma", "delta"]])
        provider = LocalCorpusProvider(
            [("d1", "beta comes from alpha"), ("d2", "delta comes from gamma")]
        )
        patterns = mine_patterns(provider, table, ("A", "B"), min_support=2)
        (p,) = patterns
        assert p.direction == REVERSE
        assert p.context == ("comes", "from")

    def test_support_recount_is_consistent(self, principal_fixture):
        table, provider = principal_fixture
        patterns = mine_patterns(provider, table, ("principal", "university"), 2)
        supports = context_supports(provider, table, ("principal", "university"), 5, 5)
        for p in patterns:
            assert supports[(p.context, p.direction)] == p.support

    def test_raising_threshold_never_adds_raw_candidates(self, principal_fixture):
        table, provider = principal_fixture
        supports = context_supports(provider, table, ("principal", "university"), 5, 5)
        for q1, q2 in [(1, 2), (2, 3), (3, 5)]:
            low = {c for c, n in supports.items() if n >= q1}
            high = {c for c, n in supports.items() if n >= q2}
            assert high <= low

    def test_min_support_validated(self, principal_fixture):
        table, provider = principal_fixture
        with pytest.raises(ValueError):
            mine_patterns(provider, table, ("principal", "university"), min_support=0)


class TestExtract:
    def test_worked_arena_location_snippet(self):
        pattern = Pattern("Arena", "Location", ("in",), FORWARD, 2)
        table = make_table(
            ["Arena", "Location"], [["WheatonFieldHouse", MISSING]]
        )
        provider = LocalCorpusProvider(
            [
                ("d0", "Get information about WheatonFieldHouse in Wheaton, IL, "
                       "including location, directions, reviews and photos."),
            ]
        )
        d = Dictionary("Location", ("WheatonIL", "SanFrancsicoCA"))
        assert extract_by_pattern(pattern, table, 0, "Location", provider, d) == "WheatonIL"

    def test_film_director_extraction(self, film_fixture):
        table, _ = film_fixture
        pattern = Pattern("Film", "Director", ("director",), FORWARD, 7)
        row = make_table(["Film", "Director"], [["Se7en", MISSING]])
        provider = LocalCorpusProvider(
            [("d", "Se7en director David Fincher came up at the panel.")]
        )
        d = Dictionary("Director", tuple(r[1] for r in table.rows))
        assert extract_by_pattern(pattern, row, 0, "Director", provider, d) == "David Fincher"

    def test_reverse_pattern_reads_before_context(self):
        pattern = Pattern("Film", "Director", ("director", "of"), REVERSE, 7)
        row = make_table(["Film", "Director"], [["Fight Club", MISSING]])
        provider = LocalCorpusProvider([("d", "David Fincher director of Fight Club.")])
        d = Dictionary("Director", ("David Fincher", "Milos Forman"))
        assert extract_by_pattern(pattern, row, 0, "Director", provider, d) == "David Fincher"

    def test_context_may_float_away_from_known_value(self):
        # the pattern context is anchored at the unknown side; extra words next
        # to the known value must not break extraction
        pattern = Pattern("principal", "university", ("the", "principal", "of"), FORWARD, 2)
        row = make_table(["principal", "university"], [["Bo Li", MISSING]])
        provider = LocalCorpusProvider(
            [("d", "Bo Li is currently the principal of Fudan University")]
        )
        d = Dictionary("university", ("Fudan University", "Peking University"))
        assert extract_by_pattern(pattern, row, 0, "university", provider, d) == "Fudan University"

    def test_no_document_with_known_value(self):
        pattern = Pattern("A", "B", ("in",), FORWARD, 1)
        row = make_table(["A", "B"], [["alpha", MISSING]])
        provider = LocalCorpusProvider([("d", "unrelated text in here")])
        assert extract_by_pattern(pattern, row, 0, "B", provider, Dictionary("B", ("x",))) is None

    def test_dictionary_miss_returns_none(self):
        pattern = Pattern("A", "B", ("in",), FORWARD, 1)
        row = make_table(["A", "B"], [["alpha", MISSING]])
        provider = LocalCorpusProvider([("d", "alpha in unknownvalue")])
        assert extract_by_pattern(pattern, row, 0, "B", provider, Dictionary("B", ("x",))) is None

    def test_missing_known_value_rejected(self):
        pattern = Pattern("A", "B", ("in",), FORWARD, 1)
        row = make_table(["A", "B"], [[MISSING, MISSING]])
        provider = LocalCorpusProvider([])
        with pytest.raises(ValueError, match="missing"):
            extract_by_pattern(pattern, row, 0, "B", provider, Dictionary("B", ("x",)))

    def test_pattern_not_covering_sink_rejected(self):
        pattern = Pattern("A", "B", ("in",), FORWARD, 1)
        row = make_table(["A", "B", "C"], [["a", "b", MISSING]])
        with pytest.raises(ValueError, match="cover"):
            extract_by_pattern(pattern, row, 0, "C", LocalCorpusProvider([]), Dictionary("C", ("x",)))


def test_mine_then_extract_round_trip():
    # corpora generated from a template recover masked values exactly
    rng = random.Random(7)
    contexts = [["of"], ["made", "by"], ["belongs", "to", "the"]]
    for trial in range(10):
        ctx = rng.choice(contexts)
        n = rng.randint(4, 8)
        rows = [[f"left{trial}{i}", f"right{trial}{i}"] for i in range(n)]
        table = make_table(["A", "B"], rows)
        provider = LocalCorpusProvider(
            [(f"d{i}", f"{a} {' '.join(ctx)} {b}.") for i, (a, b) in enumerate(rows)]
        )
        patterns = mine_patterns(provider, table, ("A", "B"), min_support=n - 1, sample=n)
        assert patterns, f"no pattern for context {ctx}"
        target = rng.randrange(n)
        masked = table.with_cell(target, "B", MISSING)
        d = Dictionary("B", tuple(r[1] for r in rows))
        value = extract_by_pattern(patterns[0], masked, target, "B", provider, d)
        assert value == rows[target][1]


def test_pattern_json_round_trip(tmp_path):
    patterns = [
        Pattern("A", "B", ("in",), FORWARD, 4),
        Pattern("A", "B", ("made", "by"), REVERSE, 2),
    ]
    path = tmp_path / "patterns.json"
    save_patterns(patterns, path)
    assert load_patterns(path) == patterns


def test_pattern_validation():
    with pytest.raises(ValueError):
        Pattern("A", "B", (), FORWARD, 1)
    with pytest.raises(ValueError):
        Pattern("A", "B", ("x",), "sideways", 1)
