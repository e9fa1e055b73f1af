"""Positions, plays and the availability rule for 3T and C2T.

3T (``Mode.UNRESTRICTED``) lets a player claim any unclaimed cell.  C2T
(``Mode.GRAVITY``) only offers, in every column, the unclaimed cell of least
height.  The gravity rule applies from the very first move, so the empty
board offers exactly layer 1.

Plays here always run to the full board; whether a line has been completed
is a query (:func:`find_winning_line`), not a reason to stop.  The solver is
the only place that applies the stop-at-win rule.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .board import (BoardDims, Cell, ColumnId, cell_at, cell_index, column_index,
                    line_set, validate_cell)
from .errors import IllegalMoveError, InvalidCellError, OverfullColumnError, PreconditionError

EMPTY = 0

Play = tuple[Cell, ...]


class Player(enum.IntEnum):
    FIRST = 1
    SECOND = 2

    @property
    def symbol(self) -> str:
        return "X" if self is Player.FIRST else "O"

    @property
    def other(self) -> Player:
        return Player.SECOND if self is Player.FIRST else Player.FIRST

    @classmethod
    def from_symbol(cls, s: str) -> Player:
        try:
            return {"X": cls.FIRST, "O": cls.SECOND}[s.upper()]
        except KeyError:
            raise ValueError(f"unknown player symbol {s!r}") from None


class Mode(enum.Enum):
    UNRESTRICTED = "3t"
    GRAVITY = "c2t"

    @classmethod
    def parse(cls, s: str | Mode) -> Mode:
        if isinstance(s, Mode):
            return s
        return cls(s.lower())


_SYMBOLS = {EMPTY: ".", Player.FIRST: "X", Player.SECOND: "O"}
_FROM_SYMBOL = {".": EMPTY, "X": Player.FIRST, "O": Player.SECOND}


@dataclass(frozen=True)
class Position:
    """A partial labeling of the board.

    Equality and hashing only look at the labels; the player to move is a
    function of them.
    """

    dims: BoardDims
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != self.dims.size:
            raise PreconditionError(
                f"{len(self.labels)} labels for a board of {self.dims.size} cells")
        nx = self.labels.count(Player.FIRST)
        no = self.labels.count(Player.SECOND)
        if nx + no + self.labels.count(EMPTY) != len(self.labels):
            raise PreconditionError("labels must be EMPTY, FIRST or SECOND")
        if nx - no not in (0, 1):
            raise PreconditionError(f"{nx} X against {no} O cannot arise from alternating play")

    @classmethod
    def empty(cls, dims: BoardDims) -> Position:
        return cls(dims, (EMPTY,) * dims.size)

    @property
    def move_count(self) -> int:
        return self.dims.size - self.labels.count(EMPTY)

    @property
    def to_move(self) -> Player:
        return Player.FIRST if self.move_count % 2 == 0 else Player.SECOND

    @property
    def is_full(self) -> bool:
        return EMPTY not in self.labels

    def label(self, cell: Sequence[int]) -> int:
        return self.labels[cell_index(self.dims, cell)]

    def masks(self) -> tuple[int, int]:
        """Bitmasks of First's and Second's cells."""
        x = o = 0
        for i, v in enumerate(self.labels):
            if v == Player.FIRST:
                x |= 1 << i
            elif v == Player.SECOND:
                o |= 1 << i
        return x, o

    @classmethod
    def from_masks(cls, dims: BoardDims, x: int, o: int) -> Position:
        return cls(dims, tuple(
            Player.FIRST if x >> i & 1 else Player.SECOND if o >> i & 1 else EMPTY
            for i in range(dims.size)))

    def to_string(self) -> str:
        body = "".join(_SYMBOLS[v] for v in self.labels)
        return f"{self.dims.n},{self.dims.d}:{body}"

    @classmethod
    def from_string(cls, s: str) -> Position:
        header, _, body = s.strip().partition(":")
        try:
            n, d = (int(t) for t in header.split(","))
            labels = tuple(_FROM_SYMBOL[ch] for ch in body.upper())
        except (ValueError, KeyError):
            raise PreconditionError(f"malformed position string {s!r}") from None
        return cls(BoardDims(n, d), labels)

    def __str__(self):
        return self.to_string()


def available_indices(pos: Position, mode: Mode) -> list[int]:
    """Flat indices of the legal next moves, ascending."""
    labels = pos.labels
    if mode is Mode.UNRESTRICTED:
        return [i for i, v in enumerate(labels) if v == EMPTY]
    m = pos.dims.column_count
    out = []
    for col in range(m):
        for i in range(col, pos.dims.size, m):
            if labels[i] == EMPTY:
                out.append(i)
                break
    out.sort()
    return out


def available_moves(pos: Position, mode: Mode) -> list[Cell]:
    return [cell_at(pos.dims, i) for i in available_indices(pos, mode)]


def move_error(pos: Position, cell: Sequence[int], mode: Mode) -> str | None:
    """Why ``cell`` is not a legal next move, or None if it is."""
    try:
        i = cell_index(pos.dims, cell)
    except InvalidCellError:
        return IllegalMoveError.OUT_OF_RANGE
    if pos.labels[i] != EMPTY:
        return IllegalMoveError.OCCUPIED
    if mode is Mode.GRAVITY and cell[-1] > 1:
        below = i - pos.dims.column_count
        if pos.labels[below] == EMPTY:
            return IllegalMoveError.FLOATING
    return None


def apply_move(pos: Position, cell: Sequence[int], mode: Mode) -> Position:
    reason = move_error(pos, cell, mode)
    if reason is not None:
        raise IllegalMoveError(reason, tuple(cell))
    i = cell_index(pos.dims, cell)
    labels = list(pos.labels)
    labels[i] = pos.to_move
    return Position(pos.dims, tuple(labels))


def replay(play: Sequence[Sequence[int]], dims: BoardDims, mode: Mode,
           start: Position | None = None) -> Position:
    pos = Position.empty(dims) if start is None else start
    for cell in play:
        pos = apply_move(pos, cell, mode)
    return pos


def first_invalid_move(play: Sequence[Sequence[int]], dims: BoardDims,
                       mode: Mode) -> tuple[int, str] | None:
    """Index and reason of the first move that breaks the rules, or None."""
    pos = Position.empty(dims)
    if len(play) > dims.size:
        return dims.size, "too long"
    for k, cell in enumerate(play):
        reason = move_error(pos, cell, mode)
        if reason is not None:
            return k, reason
        pos = apply_move(pos, cell, mode)
    return None


def is_play_valid(play: Sequence[Sequence[int]], dims: BoardDims, mode: Mode) -> bool:
    return first_invalid_move(play, dims, mode) is None


def play_as_columns(play: Sequence[Sequence[int]]) -> list[ColumnId]:
    return [tuple(c[:-1]) for c in play]


def columns_as_play(columns: Sequence[Sequence[int]], dims: BoardDims) -> Play:
    """Realize a column sequence as a gravity play (lowest free cell each time)."""
    heights = [0] * dims.column_count
    out = []
    for col in columns:
        col = tuple(col)
        if len(col) != dims.d - 1:
            raise InvalidCellError(f"column {col} needs {dims.d - 1} coordinates")
        j = column_index(dims, col)
        if heights[j] == dims.n:
            raise OverfullColumnError(f"column {col} chosen more than {dims.n} times")
        heights[j] += 1
        out.append(col + (heights[j],))
    return tuple(out)


def find_winning_line(pos: Position) -> tuple[int, Player] | None:
    """The smallest-id line fully claimed by one player, with its owner."""
    labels = pos.labels
    for lid, cells in enumerate(line_set(pos.dims).flat):
        v = labels[cells[0]]
        if v != EMPTY and all(labels[i] == v for i in cells):
            return lid, Player(v)
    return None


def terminal_position(play: Sequence[Sequence[int]], dims: BoardDims,
                      mode: Mode = Mode.GRAVITY):
    """The full coloring left by a complete play; odd moves are First's."""
    from .coloring import Coloring

    if len(play) != dims.size:
        raise PreconditionError(f"play has {len(play)} moves, board has {dims.size} cells")
    bad = first_invalid_move(play, dims, mode)
    if bad is not None:
        raise PreconditionError(f"move {bad[0]} is illegal ({bad[1]})")
    labels = [0] * dims.size
    for k, cell in enumerate(play):
        labels[cell_index(dims, cell)] = Player.FIRST if k % 2 == 0 else Player.SECOND
    return Coloring(dims, tuple(labels))


def play_to_json(play: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(c) for c in play]


def play_from_json(obj: Sequence[Sequence[int]], dims: BoardDims) -> Play:
    return tuple(validate_cell(dims, tuple(c)) for c in obj)


def columns_to_json(play: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(c) for c in play_as_columns(play)]
