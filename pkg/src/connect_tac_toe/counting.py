"""Exact play and terminal-position counts, with brute-force oracles.

Gravity plays are in bijection with orderings of the multiset holding every
column n times, which is what :func:`play_count_formula` evaluates and what
:func:`enumerate_plays` walks.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import partial

from ._parallel import pmap
from .board import BoardDims
from .errors import ResourceLimitError
from .game import Mode, columns_as_play, first_invalid_move


def multinomial(*ks: int) -> int:
    """(k_1 + ... + k_r)! / (k_1! ... k_r!) as a product of binomials."""
    out, total = 1, 0
    for k in ks:
        total += k
        out *= math.comb(total, k)
    return out


def play_count_formula(dims: BoardDims, mode: Mode) -> int:
    if mode is Mode.UNRESTRICTED:
        return math.factorial(dims.size)
    return multinomial(*([dims.n] * dims.column_count))


def tp_count_formula(dims: BoardDims) -> int:
    """Number of halving colorings, C(n^d, floor(n^d / 2))."""
    return math.comb(dims.size, dims.size // 2)


class _Budget:
    __slots__ = ("cap", "count")

    def __init__(self, cap):
        self.cap = cap
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.cap:
            raise ResourceLimitError(f"more than {self.cap} plays", partial=self.count - 1)


# every SAMPLE_STRIDE-th gravity play is replayed through the cell-level rules
SAMPLE_STRIDE = 97


def _count_gravity(heights: list[int], n: int, remaining: int, seq: list[int],
                   budget: _Budget, samples: list[tuple[int, ...]]):
    if remaining == 0:
        budget.tick()
        if budget.count % SAMPLE_STRIDE == 1:
            samples.append(tuple(seq))
        return
    for j, h in enumerate(heights):
        if h < n:
            heights[j] = h + 1
            seq.append(j)
            _count_gravity(heights, n, remaining - 1, seq, budget, samples)
            seq.pop()
            heights[j] = h


def _count_unrestricted(free: list[bool], remaining: int, budget: _Budget):
    if remaining == 0:
        budget.tick()
        return
    for i, f in enumerate(free):
        if f:
            free[i] = False
            _count_unrestricted(free, remaining - 1, budget)
            free[i] = True


def _enumerate_shard(first: int, dims: BoardDims, mode: Mode, cap: int):
    """Count the plays whose first move is column/cell ``first``."""
    budget = _Budget(cap)
    samples = []
    if mode is Mode.GRAVITY:
        heights = [0] * dims.column_count
        heights[first] = 1
        _count_gravity(heights, dims.n, dims.size - 1, [first], budget, samples)
    else:
        free = [True] * dims.size
        free[first] = False
        _count_unrestricted(free, dims.size - 1, budget)
    return budget.count, samples


def enumerate_plays(dims: BoardDims, mode: Mode, cap: int = 10**6, threads: int = 1) -> int:
    """Count every valid full play by depth-first enumeration.

    Gravity plays are enumerated as column sequences; a sample of them is
    turned back into cell plays and checked against the availability rule.
    Work is sharded by the first move and the shard counts are summed.
    """
    firsts = range(dims.column_count if mode is Mode.GRAVITY else dims.size)
    results = pmap(partial(_enumerate_shard, dims=dims, mode=mode, cap=cap), firsts, threads)
    total = 0
    for count, samples in results:
        total += count
        if total > cap:
            raise ResourceLimitError(f"more than {cap} plays", partial=total)
        prefixes = list(dims.columns())
        for seq in samples:
            play = columns_as_play([prefixes[j] for j in seq], dims)
            bad = first_invalid_move(play, dims, Mode.GRAVITY)
            if bad is not None:
                raise AssertionError(f"enumerated column sequence {seq} is not a legal play: {bad}")
    return total


def tp_masks(dims: BoardDims, cap: int = 10**6) -> set[int]:
    """First-cell bitmasks of all terminal colorings reachable by gravity play.

    Breadth first over deduplicated positions: the positions after ``k``
    moves are exactly the distinct labelings left by the length-k plays.
    """
    m = dims.column_count
    size = dims.size
    full = (1 << size) - 1
    bottom = (1 << m) - 1
    frontier = {(0, 0)}
    for ply in range(size):
        nxt = set()
        for x, o in frontier:
            occ = x | o
            avail = ~occ & ((occ << m) | bottom) & full
            while avail:
                b = avail & -avail
                avail ^= b
                nxt.add((x | b, o) if ply % 2 == 0 else (x, o | b))
        if len(nxt) > cap:
            raise ResourceLimitError(
                f"{len(nxt)} positions after {ply + 1} moves exceeds the cap of {cap}",
                partial=len(nxt))
        frontier = nxt
    return {x for x, _ in frontier}


def enumerate_tp(dims: BoardDims, mode: Mode, cap: int = 10**6):
    """The set of terminal colorings for a restriction mode.

    Unrestricted: every halving coloring.  Gravity: the distinct terminal
    colorings over all gravity plays, a subset of the former.
    """
    from .coloring import Coloring, _same_popcount_masks

    if mode is Mode.UNRESTRICTED:
        total = tp_count_formula(dims)
        if total > cap:
            raise ResourceLimitError(f"{total} halving colorings exceeds the cap of {cap}")
        masks = _same_popcount_masks(dims.size, (dims.size + 1) // 2)
    else:
        masks = tp_masks(dims, cap)
    return {Coloring.from_mask(dims, s) for s in masks}


@dataclass(frozen=True)
class CountReport:
    dims: BoardDims
    mode: Mode
    formula_value: int
    enumerated_value: int | None
    elapsed: float

    @property
    def match(self) -> bool | None:
        if self.enumerated_value is None:
            return None
        return self.enumerated_value == self.formula_value

    @property
    def discrepancy(self) -> bool:
        return self.match is False

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "n": self.dims.n,
            "d": self.dims.d,
            "mode": self.mode.value,
            "formula": str(self.formula_value),
            "enumerated": None if self.enumerated_value is None else str(self.enumerated_value),
            "match": self.match,
        }
        if timing:
            out["elapsed_ms"] = round(self.elapsed * 1000, 3)
        return out


def count_plays_report(dims: BoardDims, mode: Mode, verify: bool = False,
                       cap: int = 10**6, threads: int = 1) -> CountReport:
    t0 = time.perf_counter()
    formula = play_count_formula(dims, mode)
    enumerated = enumerate_plays(dims, mode, cap, threads) if verify else None
    return CountReport(dims, mode, formula, enumerated, time.perf_counter() - t0)
