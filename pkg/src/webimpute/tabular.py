"""Relational tables with explicit missing-cell markers.

Tables are loaded from RFC-4180-style CSV with a header row.  An empty CSV
field becomes the in-memory :data:`MISSING` marker; every other cell is kept
byte-exact.  Tables are treated as immutable after construction: all
"mutation" happens by building a new table (see :meth:`Table.with_cell` and
:func:`mask_random`), which makes them safe to share across threads.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Optional, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .rules import Rule

MISSING = None
"""Marker for an absent cell value, distinct from the empty string."""

Cell = Optional[str]


class TableError(ValueError):
    """Malformed table input or an operation violating a table contract."""


class MaskError(ValueError):
    """Requested mask cannot be produced without stripping a row bare."""


@dataclass
class Table:
    """An in-memory relational table of string cells.

    Attributes:
        name: identifier for reports (usually the source file stem).
        columns: ordered, unique, non-empty attribute names.
        rows: list of rows; every row has exactly ``len(columns)`` cells.
    """

    name: str
    columns: list[str]
    rows: list[list[Cell]]

    def __post_init__(self) -> None:
        if not all(self.columns):
            raise TableError("column names must be non-empty")
        if len(set(self.columns)) != len(self.columns):
            raise TableError("column names must be unique")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise TableError(
                    f"row {i + 1} has {len(row)} cells, expected {len(self.columns)}"
                )
        self._index = {c: i for i, c in enumerate(self.columns)}

    def column_index(self, attr: str) -> int:
        try:
            return self._index[attr]
        except KeyError:
            raise TableError(f"unknown attribute {attr!r}") from None

    def cell(self, row: int, attr: str) -> Cell:
        return self.rows[row][self.column_index(attr)]

    def with_cell(self, row: int, attr: str, value: Cell) -> "Table":
        """A new table with one cell replaced."""
        rows = [list(r) for r in self.rows]
        rows[row][self.column_index(attr)] = value
        return Table(self.name, list(self.columns), rows)

    def missing_cells(self) -> Iterator[tuple[int, str]]:
        """(row, attr) pairs of missing cells, in row-major order."""
        for r, row in enumerate(self.rows):
            for c, value in zip(self.columns, row):
                if value is MISSING:
                    yield r, c

    def copy(self) -> "Table":
        return Table(self.name, list(self.columns), [list(r) for r in self.rows])

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class MaskSpec:
    """How to knock values out of a complete table for an experiment.

    ``protected_attrs`` are never masked (key attributes stay intact).
    """

    ratio: float
    seed: int
    protected_attrs: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError(f"mask ratio must be in [0,1], got {self.ratio}")
        object.__setattr__(self, "protected_attrs", frozenset(self.protected_attrs))


@dataclass(frozen=True)
class MaskedCell:
    """Ground-truth record for one masked cell."""

    row: int
    attr: str
    value: str

    def to_dict(self) -> dict:
        return {"row": self.row, "attr": self.attr, "value": self.value}


def load_table(path: str | Path) -> Table:
    """Load a CSV file (UTF-8, header row) into a :class:`Table`.

    Empty fields become :data:`MISSING`.  Ragged rows and duplicate headers
    raise :class:`TableError` naming the offending row.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableError(f"{path}: empty file, expected a header row") from None
        if len(set(header)) != len(header):
            dupes = sorted({c for c in header if header.count(c) > 1})
            raise TableError(f"{path}: duplicate header (row 1): {', '.join(dupes)}")
        if not all(header):
            raise TableError(f"{path}: empty column name in header (row 1)")
        rows: list[list[Cell]] = []
        for lineno, record in enumerate(reader, start=2):
            if not record:
                continue  # blank trailing line
            if len(record) != len(header):
                raise TableError(
                    f"{path}: row {lineno} has {len(record)} fields, "
                    f"expected {len(header)}"
                )
            rows.append([f if f != "" else MISSING for f in record])
    return Table(path.stem, header, rows)


def write_table(table: Table, path: str | Path) -> None:
    Path(path).write_bytes(to_csv_text(table).encode("utf-8"))


def to_csv_text(table: Table) -> str:
    """Render a table back to CSV; missing cells become empty fields."""
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow(["" if v is MISSING else v for v in row])
    return buf.getvalue()


def write_ground_truth(entries: Sequence[MaskedCell], path: str | Path) -> None:
    data = [e.to_dict() for e in entries]
    Path(path).write_text(
        json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def read_ground_truth(path: str | Path) -> list[MaskedCell]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [MaskedCell(int(d["row"]), d["attr"], d["value"]) for d in data]


def mask_random(
    table: Table,
    spec: MaskSpec,
    rules: Iterable["Rule"] | None = None,
) -> tuple[Table, list[MaskedCell]]:
    """Mask ``floor(ratio * maskable_cells)`` cells at seeded-random positions.

    Protected attributes are untouched.  Every row keeps at least one
    unmasked non-protected cell, so a masked cell always has neighbouring
    evidence left in its tuple; when ``rules`` are given, the stronger check
    is applied: every masked cell keeps at least one unmasked LHS attribute
    among the rules that cover it.  If the ratio makes that impossible a
    :class:`MaskError` is raised.

    Deterministic: the same (table, spec) always yields the same mask.
    """
    unknown = spec.protected_attrs - set(table.columns)
    if unknown:
        raise TableError(f"protected attributes not in table: {sorted(unknown)}")
    maskable_cols = [c for c in table.columns if c not in spec.protected_attrs]
    positions = [(r, c) for r in range(len(table.rows)) for c in maskable_cols]
    for r, c in positions:
        if table.cell(r, c) is MISSING:
            raise TableError(
                f"cannot mask: cell (row {r}, {c}) is already missing"
            )
    count = math.floor(spec.ratio * len(positions))
    rng = random.Random(spec.seed)
    shuffled = list(positions)
    rng.shuffle(shuffled)

    rule_list = list(rules) if rules is not None else None
    covering: dict[str, list["Rule"]] = {}
    if rule_list:
        for col in maskable_cols:
            covering[col] = [ru for ru in rule_list if col in ru.rhs]

    masked_by_row: dict[int, set[str]] = {}
    unmasked_left = {r: len(maskable_cols) for r in range(len(table.rows))}
    chosen: list[tuple[int, str]] = []
    for r, c in shuffled:
        if len(chosen) == count:
            break
        if unmasked_left[r] <= 1:
            continue
        if rule_list is not None:
            tentative = masked_by_row.get(r, set()) | {c}
            if any(
                covering.get(a)
                and all(set(ru.lhs) <= tentative for ru in covering[a])
                for a in tentative
            ):
                continue
        chosen.append((r, c))
        unmasked_left[r] -= 1
        masked_by_row.setdefault(r, set()).add(c)
    if len(chosen) < count:
        raise MaskError(
            f"ratio {spec.ratio} would mask every non-protected cell of some row "
            f"(wanted {count} cells, only {len(chosen)} can be masked)"
        )

    col_order = {c: i for i, c in enumerate(table.columns)}
    chosen.sort(key=lambda rc: (rc[0], col_order[rc[1]]))
    rows = [list(r) for r in table.rows]
    truth = []
    for r, c in chosen:
        value = rows[r][col_order[c]]
        truth.append(MaskedCell(r, c, value))
        rows[r][col_order[c]] = MISSING
    return Table(table.name, list(table.columns), rows), truth
