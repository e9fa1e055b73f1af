"""Exact game values under the stop-at-win rule.

The game ends as soon as the player who just moved owns a whole line; a
full board without that is a draw.  Internally a value is a score from the
point of view of the player to move: ``size + 1 - e`` for a win ending on
ply ``e``, its negation for a loss and 0 for a draw.  Because the ply of a
position is its number of claimed cells, scores depend on the position only,
which keeps transposition-table entries sound, and maximizing them prefers
fast wins and slow losses.
"""
from __future__ import annotations

import enum
import random
import time
from dataclasses import dataclass, field
from functools import partial

from ._parallel import pmap
from .board import BoardDims, Cell, cell_at, line_set
from .errors import PreconditionError, ResourceLimitError
from .game import Mode, Play, Player, Position, find_winning_line

DEFAULT_SEED = 0x5EED
NAIVE_NODE_CAP = 10**7
SEARCH_NODE_CAP = 10**8

EXACT, LOWER, UPPER = 0, 1, 2


class Outcome(enum.IntEnum):
    SECOND_WIN = -1
    DRAW = 0
    FIRST_WIN = 1

    @property
    def label(self) -> str:
        return {-1: "SecondWin", 0: "Draw", 1: "FirstWin"}[self.value]

    @classmethod
    def from_label(cls, s: str) -> Outcome:
        return {"SecondWin": cls.SECOND_WIN, "Draw": cls.DRAW, "FirstWin": cls.FIRST_WIN}[s]


@dataclass(frozen=True)
class GameValue:
    """Outcome from First's point of view and plies until the game ends."""

    outcome: Outcome
    plies: int | None = None

    def to_json(self) -> dict:
        return {"outcome": self.outcome.label, "plies": self.plies}

    def __str__(self):
        return self.outcome.label if self.plies is None else f"{self.outcome.label} in {self.plies}"


class _Engine:
    """Bitmask move generation and win tests for one board and mode."""

    def __init__(self, dims: BoardDims, mode: Mode):
        self.dims = dims
        self.mode = mode
        self.size = dims.size
        self.big = dims.size + 1
        ls = line_set(dims)
        self.cell_lines = tuple(tuple(ls.masks[lid] for lid in ids) for ids in ls.incidence)
        # busy cells first: more lines through a cell, earlier in the order
        rank = sorted(range(self.size), key=lambda i: (-len(ls.incidence[i]), i))
        self.order = tuple(rank)
        self.full = (1 << self.size) - 1
        self.bottom = (1 << dims.column_count) - 1
        self.shift = dims.column_count

    def moves(self, occ: int) -> list[int]:
        """Legal moves in search order."""
        if self.mode is Mode.UNRESTRICTED:
            return [i for i in self.order if not occ >> i & 1]
        # a cell is available iff it is free and on layer 1 or above a claimed cell
        avail = ~occ & ((occ << self.shift) | self.bottom) & self.full
        return [i for i in self.order if avail >> i & 1]

    def wins(self, cell: int, mine: int) -> bool:
        for m in self.cell_lines[cell]:
            if mine & m == m:
                return True
        return False

    def to_value(self, score: int, ply: int) -> GameValue:
        first = score if ply % 2 == 0 else -score
        if first > 0:
            return GameValue(Outcome.FIRST_WIN, self.big - first - ply)
        if first < 0:
            return GameValue(Outcome.SECOND_WIN, self.big + first - ply)
        return GameValue(Outcome.DRAW, self.size - ply)


def _split(pos: Position) -> tuple[int, int, int]:
    x, o = pos.masks()
    ply = pos.move_count
    return (x, o, ply) if ply % 2 == 0 else (o, x, ply)


def _finished(pos: Position) -> GameValue | None:
    hit = find_winning_line(pos)
    if hit is not None:
        return GameValue(Outcome.FIRST_WIN if hit[1] is Player.FIRST else Outcome.SECOND_WIN, 0)
    if pos.is_full:
        return GameValue(Outcome.DRAW, 0)
    return None


class _Naive:
    def __init__(self, engine: _Engine, cap: int, record: dict | None = None):
        self.e = engine
        self.cap = cap
        self.nodes = 0
        self.record = record

    def search(self, me: int, opp: int, ply: int) -> int:
        self.nodes += 1
        if self.nodes > self.cap:
            raise ResourceLimitError(f"naive search exceeded {self.cap} nodes", partial=self.nodes)
        e = self.e
        moves = e.moves(me | opp)
        if not moves:
            return 0
        best = -e.big - 1
        for c in moves:
            mine = me | 1 << c
            if e.wins(c, mine):
                s = e.big - ply - 1
            else:
                s = -self.search(opp, mine, ply + 1)
            if s > best:
                best = s
        if self.record is not None:
            key = (me, opp) if ply % 2 == 0 else (opp, me)
            old = self.record.setdefault(key, best)
            if old != best:
                raise AssertionError(f"position {key} valued {old} and {best}")
        return best


def naive_solve(pos: Position, mode: Mode, node_cap: int = NAIVE_NODE_CAP) -> GameValue:
    """Plain minimax over the whole remaining tree, no pruning or memo."""
    done = _finished(pos)
    if done is not None:
        return done
    engine = _Engine(pos.dims, mode)
    me, opp, ply = _split(pos)
    return engine.to_value(_Naive(engine, node_cap).search(me, opp, ply), ply)


def naive_value_table(dims: BoardDims, mode: Mode,
                      node_cap: int = NAIVE_NODE_CAP) -> dict[Position, GameValue]:
    """Naive values of every reachable non-terminal position.

    One unpruned traversal from the empty board computes the minimax value
    of every node; each position's value is recorded as it is computed (and
    checked equal whenever a transposition reaches it again), never looked up.
    """
    engine = _Engine(dims, mode)
    record: dict[tuple[int, int], int] = {}
    _Naive(engine, node_cap, record).search(0, 0, 0)
    out = {}
    for (x, o), score in record.items():
        pos = Position.from_masks(dims, x, o)
        out[pos] = engine.to_value(score, pos.move_count)
    return out


@dataclass(frozen=True)
class SolverConfig:
    table_bits: int = 20
    seed: int = DEFAULT_SEED
    node_cap: int = SEARCH_NODE_CAP
    threads: int = 1


class Solver:
    """Alpha-beta negamax with a Zobrist-indexed transposition table.

    Table slots hold the full position next to the bound, so a colliding
    hash costs a miss, never a wrong answer.  Slots are overwritten freely.
    """

    def __init__(self, dims: BoardDims, mode: Mode, config: SolverConfig = SolverConfig()):
        self.e = _Engine(dims, mode)
        self.config = config
        self.nodes = 0
        self.mask = (1 << config.table_bits) - 1
        self.table: list = [None] * (1 << config.table_bits)
        rng = random.Random(config.seed)
        self.zobrist = tuple((rng.getrandbits(64), rng.getrandbits(64)) for _ in range(dims.size))

    def key(self, me: int, opp: int, ply: int) -> int:
        x, o = (me, opp) if ply % 2 == 0 else (opp, me)
        h = 0
        for i in range(self.e.size):
            if x >> i & 1:
                h ^= self.zobrist[i][0]
            elif o >> i & 1:
                h ^= self.zobrist[i][1]
        return h

    def search(self, me: int, opp: int, ply: int, alpha: int, beta: int, key: int) -> int:
        self.nodes += 1
        if self.nodes > self.config.node_cap:
            raise ResourceLimitError(
                f"search exceeded {self.config.node_cap} nodes", partial=self.nodes)
        e = self.e
        moves = e.moves(me | opp)
        if not moves:
            return 0
        for c in moves:
            if e.wins(c, me | 1 << c):
                return e.big - ply - 1
        # no win next ply: best is a win two plies later (or a draw), worst a loss next ply
        hi = e.big - ply - 3 if ply + 3 <= e.size else 0
        lo = -(e.size - ply - 1)
        if alpha < lo:
            alpha = lo
        if beta > hi:
            beta = hi
        if alpha >= beta:
            return alpha

        slot = key & self.mask
        entry = self.table[slot]
        hint = None
        if entry is not None and entry[0] == me and entry[1] == opp:
            _, _, flag, val, hint = entry
            if flag == EXACT:
                return val
            if flag == LOWER and val > alpha:
                alpha = val
            elif flag == UPPER and val < beta:
                beta = val
            if alpha >= beta:
                return val
        if hint is not None:
            moves.remove(hint)
            moves.insert(0, hint)

        alpha0 = alpha
        best, best_move = -e.big - 1, moves[0]
        side = ply & 1
        for c in moves:
            s = -self.search(opp, me | 1 << c, ply + 1, -beta, -alpha,
                             key ^ self.zobrist[c][side])
            if s > best:
                best, best_move = s, c
                if s > alpha:
                    alpha = s
                    if alpha >= beta:
                        break
        flag = UPPER if best <= alpha0 else LOWER if best >= beta else EXACT
        self.table[slot] = (me, opp, flag, best, best_move)
        return best

    def score(self, me: int, opp: int, ply: int) -> int:
        b = self.e.big + 1
        return self.search(me, opp, ply, -b, b, self.key(me, opp, ply))

    def child_scores(self, pos: Position) -> dict[int, int]:
        """Exact mover-perspective score of every legal move, by cell index."""
        me, opp, ply = _split(pos)
        e = self.e
        out = {}
        for c in sorted(e.moves(me | opp)):
            mine = me | 1 << c
            if e.wins(c, mine):
                out[c] = e.big - ply - 1
            else:
                out[c] = -self.score(opp, mine, ply + 1)
        return out

    def value(self, pos: Position) -> GameValue:
        self._check(pos)
        done = _finished(pos)
        if done is not None:
            return done
        me, opp, ply = _split(pos)
        return self.e.to_value(self.score(me, opp, ply), ply)

    def best_move(self, pos: Position) -> Cell:
        self._check(pos)
        if _finished(pos) is not None:
            raise PreconditionError("the game is over; no move to make")
        scores = self.child_scores(pos)
        best = max(scores.values())
        return cell_at(pos.dims, min(c for c, s in scores.items() if s == best))

    def principal_variation(self, pos: Position) -> Play:
        from .game import apply_move

        pv = []
        while _finished(pos) is None:
            cell = self.best_move(pos)
            pv.append(cell)
            pos = apply_move(pos, cell, self.e.mode)
        return tuple(pv)

    def _check(self, pos: Position):
        if pos.dims != self.e.dims:
            raise PreconditionError(f"solver built for {self.e.dims}, position is {pos.dims}")


@dataclass(frozen=True)
class SolveResult:
    dims: BoardDims
    mode: Mode
    value: GameValue
    principal_variation: Play
    nodes_searched: int
    elapsed: float
    seed: int = DEFAULT_SEED
    position: str = field(default="")

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "n": self.dims.n,
            "d": self.dims.d,
            "mode": self.mode.value,
            "position": self.position,
            "value": self.value.outcome.label,
            "plies": self.value.plies,
            "pv": [list(c) for c in self.principal_variation],
            "seed": self.seed,
        }
        if timing:
            out["nodes"] = self.nodes_searched
            out["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return out


def _root_child(c: int, pos: Position, mode: Mode, config: SolverConfig) -> tuple[int, int]:
    solver = Solver(pos.dims, mode, config)
    me, opp, ply = _split(pos)
    mine = me | 1 << c
    if solver.e.wins(c, mine):
        return solver.e.big - ply - 1, 1
    return -solver.score(opp, mine, ply + 1), solver.nodes


def solve(pos: Position, mode: Mode, config: SolverConfig = SolverConfig()) -> SolveResult:
    """Exact value and principal variation of ``pos``.

    With ``config.threads > 1`` the root moves are searched in separate
    processes, each with a private table; the value does not depend on it.
    """
    t0 = time.perf_counter()
    solver = Solver(pos.dims, mode, config)
    done = _finished(pos)
    if done is not None:
        value, nodes = done, 0
    elif config.threads > 1:
        me, opp, ply = _split(pos)
        moves = sorted(solver.e.moves(me | opp))
        child = partial(_root_child, pos=pos, mode=mode, config=config)
        results = pmap(child, moves, config.threads)
        value = solver.e.to_value(max(s for s, _ in results), ply)
        nodes = sum(k for _, k in results)
    else:
        value = solver.value(pos)
        nodes = solver.nodes
    pv = solver.principal_variation(pos)
    return SolveResult(pos.dims, mode, value, pv, nodes, time.perf_counter() - t0,
                       config.seed, pos.to_string())


def best_move(pos: Position, mode: Mode, config: SolverConfig = SolverConfig()) -> Cell:
    """A value-achieving move; among equal scores the smallest cell index."""
    return Solver(pos.dims, mode, config).best_move(pos)


def limited_best_move(pos: Position, mode: Mode, depth: int) -> Cell:
    """Depth-capped fallback for boards too large to solve; unsearched leaves count as draws."""
    engine = _Engine(pos.dims, mode)
    me, opp, ply = _split(pos)
    b = engine.big + 1

    def search(me, opp, ply, alpha, beta, left):
        moves = engine.moves(me | opp)
        if not moves or left == 0:
            return 0
        best = -b
        for c in moves:
            mine = me | 1 << c
            s = engine.big - ply - 1 if engine.wins(c, mine) else \
                -search(opp, mine, ply + 1, -beta, -alpha, left - 1)
            if s > best:
                best = s
                alpha = max(alpha, s)
                if alpha >= beta:
                    break
        return best

    scores = {}
    for c in sorted(engine.moves(me | opp)):
        mine = me | 1 << c
        scores[c] = engine.big - ply - 1 if engine.wins(c, mine) else \
            -search(opp, mine, ply + 1, -b, b, depth - 1)
    if not scores:
        raise PreconditionError("no legal move")
    best = max(scores.values())
    return cell_at(pos.dims, min(c for c, s in scores.items() if s == best))
