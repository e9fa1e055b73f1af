"""Geometry of the [n]^d hypercube: cells, gravity columns, layers and lines.

Cells are 1-based coordinate tuples ``(x_1, ..., x_d)``.  Coordinate ``d`` is
the gravity axis.  Flat indices put the first coordinate fastest and the last
slowest, so layer ``i`` occupies the contiguous index range
``[(i-1) * n^(d-1), i * n^(d-1))`` and the column of a cell is simply its
index modulo ``n^(d-1)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import InvalidCellError, PreconditionError, ResourceLimitError

Cell = tuple[int, ...]
ColumnId = tuple[int, ...]

MAX_CELLS = 1 << 20
# number of (n+2)^d direction/offset encodings enumerate_lines will walk
MAX_LINE_ENCODINGS = 10**6


@dataclass(frozen=True)
class BoardDims:
    n: int
    d: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.d, int):
            raise PreconditionError("n and d must be integers")
        if self.n < 1 or self.d < 1:
            raise PreconditionError(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        if self.n ** self.d > MAX_CELLS:
            raise PreconditionError(
                f"{self.n}^{self.d} cells exceeds the cap of {MAX_CELLS}")

    @property
    def size(self) -> int:
        """Number of cells, n^d."""
        return self.n ** self.d

    @property
    def column_count(self) -> int:
        """Number of gravity columns, n^(d-1); also the size of one layer."""
        return self.n ** (self.d - 1)

    def cells(self) -> Iterator[Cell]:
        """All cells in flat-index order."""
        for i in range(self.size):
            yield cell_at(self, i)

    def columns(self) -> Iterator[ColumnId]:
        """All column prefixes in flat-index order of their bottom cell."""
        for i in range(self.column_count):
            yield cell_at(self, i)[:-1]

    def __str__(self):
        return f"{self.n}^{self.d}"


def validate_cell(dims: BoardDims, cell: Sequence[int]) -> Cell:
    cell = tuple(cell)
    if len(cell) != dims.d:
        raise InvalidCellError(f"cell {cell} has {len(cell)} coordinates, board has d={dims.d}")
    for x in cell:
        if not isinstance(x, int) or not 1 <= x <= dims.n:
            raise InvalidCellError(f"coordinate {x!r} of {cell} outside [1, {dims.n}]")
    return cell


def cell_index(dims: BoardDims, cell: Sequence[int]) -> int:
    cell = validate_cell(dims, cell)
    idx = 0
    for x in reversed(cell):
        idx = idx * dims.n + (x - 1)
    return idx


def cell_at(dims: BoardDims, index: int) -> Cell:
    if not 0 <= index < dims.size:
        raise InvalidCellError(f"index {index} outside [0, {dims.size})")
    out = []
    for _ in range(dims.d):
        index, r = divmod(index, dims.n)
        out.append(r + 1)
    return tuple(out)


def column_of(cell: Sequence[int]) -> ColumnId:
    return tuple(cell[:-1])


def layer_of(cell: Sequence[int]) -> int:
    return cell[-1]


def column_index(dims: BoardDims, column: Sequence[int]) -> int:
    """Flat index of the bottom cell of ``column``, in ``[0, n^(d-1))``."""
    return cell_index(dims, tuple(column) + (1,))


def column_cells(dims: BoardDims, column: Sequence[int]) -> list[int]:
    """Flat indices of the column's cells, bottom layer first."""
    base = column_index(dims, column)
    m = dims.column_count
    return [base + h * m for h in range(dims.n)]


def layer_cells(dims: BoardDims, level: int) -> range:
    if not 1 <= level <= dims.n:
        raise InvalidCellError(f"layer {level} outside [1, {dims.n}]")
    m = dims.column_count
    return range((level - 1) * m, level * m)


@dataclass(frozen=True)
class GeometricLine:
    """n cells forming rows of an n x d matrix whose columns are APs.

    ``direction[i]`` is the common difference of coordinate ``i``.  Lines
    returned by :func:`enumerate_lines` are in canonical orientation: the
    first nonzero direction entry is +1, which for n >= 2 is the same as the
    first cell being lexicographically smaller than the last.
    """

    cells: tuple[Cell, ...]
    direction: tuple[int, ...]

    def reversed(self) -> GeometricLine:
        return GeometricLine(self.cells[::-1], tuple(-s for s in self.direction))

    def is_canonical(self) -> bool:
        for s in self.direction:
            if s:
                return s == 1
        return False

    def to_json(self) -> dict:
        return {"cells": [list(c) for c in self.cells], "direction": list(self.direction)}

    @classmethod
    def from_json(cls, obj: dict) -> GeometricLine:
        return cls(tuple(tuple(c) for c in obj["cells"]), tuple(obj["direction"]))


def line_count_formula(dims: BoardDims) -> int:
    n, d = dims.n, dims.d
    return ((n + 2) ** d - n ** d) // 2


def is_ap_matrix(cells: Sequence[Sequence[int]]) -> bool:
    """True iff the ordered cells are a non-degenerate geometric line.

    Each coordinate column must be an arithmetic progression with common
    difference -1, 0 or +1 and at least one must be non-constant.  For
    n = 1 there is no room for a difference, so any single cell passes.
    """
    if not cells:
        return False
    if len(cells) == 1:
        return True
    d = len(cells[0])
    moving = False
    for i in range(d):
        col = [c[i] for c in cells]
        step = col[1] - col[0]
        if step not in (-1, 0, 1):
            return False
        if any(b - a != step for a, b in zip(col, col[1:])):
            return False
        moving = moving or step != 0
    return moving


def _line_from_encoding(n: int, code: Sequence[int]) -> GeometricLine:
    # code[i] < n: constant coordinate code[i]+1; n: ascending; n+1: descending
    direction = tuple(0 if c < n else (1 if c == n else -1) for c in code)
    cells = []
    for t in range(n):
        cells.append(tuple(
            c + 1 if c < n else (t + 1 if c == n else n - t) for c in code))
    return GeometricLine(tuple(cells), direction)


def enumerate_lines(dims: BoardDims, cap: int = MAX_LINE_ENCODINGS) -> list[GeometricLine]:
    """Every geometric line of [n]^d exactly once, canonically oriented.

    Walks all (n+2)^d per-coordinate encodings (a constant value, ascending or
    descending), drops the n^d all-constant ones and keeps one of each
    reversal pair.  The result is sorted by cell tuples, then direction.
    """
    n, d = dims.n, dims.d
    if (n + 2) ** d > cap:
        raise ResourceLimitError(
            f"(n+2)^d = {(n + 2) ** d} encodings exceeds the cap of {cap}")
    lines = []
    for code in itertools.product(range(n + 2), repeat=d):
        first_moving = next((c for c in code if c >= n), None)
        if first_moving is None or first_moving != n:
            continue
        lines.append(_line_from_encoding(n, code))
    lines.sort(key=lambda g: (g.cells, g.direction))
    return lines


class LineSet:
    """Enumerated lines of one board together with index-level lookups.

    Line identifiers are positions in :attr:`lines`.
    """

    def __init__(self, dims: BoardDims, cap: int = MAX_LINE_ENCODINGS):
        self.dims = dims
        self.lines: tuple[GeometricLine, ...] = tuple(enumerate_lines(dims, cap))
        self.flat: tuple[tuple[int, ...], ...] = tuple(
            tuple(cell_index(dims, c) for c in g.cells) for g in self.lines)
        self.masks: tuple[int, ...] = tuple(
            sum(1 << i for i in set(cells)) for cells in self.flat)
        incidence: list[list[int]] = [[] for _ in range(dims.size)]
        for lid, cells in enumerate(self.flat):
            for i in cells:
                incidence[i].append(lid)
        self.incidence: tuple[tuple[int, ...], ...] = tuple(tuple(x) for x in incidence)

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    def __getitem__(self, lid: int) -> GeometricLine:
        return self.lines[lid]


@lru_cache(maxsize=64)
def line_set(dims: BoardDims) -> LineSet:
    return LineSet(dims)


def lines_incidence(dims: BoardDims) -> dict[Cell, frozenset[int]]:
    """Map each cell to the identifiers of the lines passing through it."""
    ls = line_set(dims)
    return {cell_at(dims, i): frozenset(ids) for i, ids in enumerate(ls.incidence)}


def lines_to_json(lines: Sequence[GeometricLine]) -> list[dict]:
    return [g.to_json() for g in lines]
