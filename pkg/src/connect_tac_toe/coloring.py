"""Full 2-colorings of the board and the constructions built from them.

A :class:`Coloring` labels every cell First or Second.  Bitmask form puts a
1 at flat index ``i`` when cell ``i`` is First; the *canonical order* of
colorings is ascending bitmask, and every search that reports a witness
reports the smallest one in that order.
"""
from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from functools import partial
from typing import Iterable, Sequence

from ._parallel import chunk_ranges, pmap
from .board import (BoardDims, GeometricLine, cell_index, enumerate_lines, layer_cells,
                    line_set)
from .errors import PreconditionError, ResourceLimitError
from .game import Play, Player


@dataclass(frozen=True)
class Coloring:
    dims: BoardDims
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != self.dims.size:
            raise PreconditionError(
                f"{len(self.labels)} labels for a board of {self.dims.size} cells")
        if any(v not in (Player.FIRST, Player.SECOND) for v in self.labels):
            raise PreconditionError("a coloring labels every cell X or O")

    @classmethod
    def from_mask(cls, dims: BoardDims, mask: int) -> Coloring:
        return cls(dims, tuple(Player.FIRST if mask >> i & 1 else Player.SECOND
                               for i in range(dims.size)))

    @property
    def mask(self) -> int:
        return sum(1 << i for i, v in enumerate(self.labels) if v == Player.FIRST)

    def count(self, player: Player) -> int:
        return self.labels.count(player)

    def at(self, cell: Sequence[int]) -> Player:
        return Player(self.labels[cell_index(self.dims, cell)])

    def layer(self, level: int) -> Coloring:
        """The coloring of layer ``level`` as a coloring of [n]^(d-1)."""
        if self.dims.d < 2:
            raise PreconditionError("layers of a 1-dimensional board are single cells")
        sub = BoardDims(self.dims.n, self.dims.d - 1)
        return Coloring(sub, tuple(self.labels[i] for i in layer_cells(self.dims, level)))

    def to_string(self) -> str:
        body = "".join("X" if v == Player.FIRST else "O" for v in self.labels)
        return f"{self.dims.n},{self.dims.d}:{body}"

    @classmethod
    def from_string(cls, s: str) -> Coloring:
        header, _, body = s.strip().partition(":")
        try:
            n, d = (int(t) for t in header.split(","))
            labels = tuple(Player.from_symbol(ch) for ch in body)
        except ValueError:
            raise PreconditionError(f"malformed coloring string {s!r}") from None
        return cls(BoardDims(n, d), labels)

    def __str__(self):
        return self.to_string()


def is_halving(coloring: Coloring) -> bool:
    size = coloring.dims.size
    return coloring.count(Player.FIRST) == (size + 1) // 2


def monochromatic_lines(coloring: Coloring, lines=None) -> list[int]:
    """Identifiers of the lines whose cells all carry one color."""
    masks = (line_set(coloring.dims) if lines is None else lines).masks
    s = coloring.mask
    return [lid for lid, m in enumerate(masks) if s & m == m or not s & m]


def is_proper(coloring: Coloring, lines=None) -> bool:
    return not monochromatic_lines(coloring, lines)


def _mask_is_proper(s: int, masks: Sequence[int]) -> bool:
    for m in masks:
        t = s & m
        if t == m or not t:
            return False
    return True


def color_flip(coloring: Coloring) -> Coloring:
    return Coloring(coloring.dims, tuple(3 - v for v in coloring.labels))


def random_halving(dims: BoardDims, rng: random.Random) -> Coloring:
    first = rng.sample(range(dims.size), (dims.size + 1) // 2)
    return Coloring.from_mask(dims, sum(1 << i for i in first))


def random_proper_halving(dims: BoardDims, rng: random.Random,
                          attempts: int = 100_000) -> Coloring:
    """Rejection-sample a proper halving coloring."""
    masks = line_set(dims).masks
    for _ in range(attempts):
        c = random_halving(dims, rng)
        if _mask_is_proper(c.mask, masks):
            return c
    raise ResourceLimitError(f"no proper halving coloring of {dims} in {attempts} draws")


class LayerKind(enum.Enum):
    BASE = "B"
    FLIPPED = "F"


@dataclass(frozen=True)
class LayerAssignment:
    """Which layers copy the base coloring and which copy its flip.

    ``kinds[i]`` describes layer ``i + 1``.  Exactly ceil(n/2) layers are Base.
    """

    kinds: tuple[LayerKind, ...]

    def __post_init__(self):
        n = len(self.kinds)
        base = sum(k is LayerKind.BASE for k in self.kinds)
        if n < 1 or base != (n + 1) // 2:
            raise PreconditionError(
                f"assignment {self.to_string()!r} needs {(n + 1) // 2} Base and "
                f"{n // 2} Flipped layers")

    @classmethod
    def from_string(cls, s: str) -> LayerAssignment:
        try:
            return cls(tuple(LayerKind(ch) for ch in s.strip().upper()))
        except ValueError:
            raise PreconditionError(f"assignment {s!r} must be a string over B/F") from None

    @classmethod
    def random(cls, n: int, rng: random.Random) -> LayerAssignment:
        kinds = [LayerKind.BASE] * ((n + 1) // 2) + [LayerKind.FLIPPED] * (n // 2)
        rng.shuffle(kinds)
        return cls(tuple(kinds))

    def to_string(self) -> str:
        return "".join(k.value for k in self.kinds)

    def flipped(self, level: int) -> bool:
        return self.kinds[level - 1] is LayerKind.FLIPPED


def _check_layer_inputs(base: Coloring, f: LayerAssignment) -> BoardDims:
    if len(f.kinds) != base.dims.n:
        raise PreconditionError(
            f"assignment has {len(f.kinds)} layers, board side is {base.dims.n}")
    if not is_halving(base):
        raise PreconditionError("layer coloring must be halving")
    return BoardDims(base.dims.n, base.dims.d + 1)


def layered_coloring(base: Coloring, f: LayerAssignment) -> Coloring:
    """Stack copies of ``base`` (Base layers) and its flip (Flipped layers)."""
    dims = _check_layer_inputs(base, f)
    labels = []
    for level in range(1, dims.n + 1):
        if f.flipped(level):
            labels.extend(3 - v for v in base.labels)
        else:
            labels.extend(base.labels)
    return Coloring(dims, tuple(labels))


def construction_slack(dims: BoardDims) -> tuple[int, int]:
    """(available opposite-colored columns, required) for the odd-n pairing.

    The layer-by-layer construction for odd n needs
    floor(n^(d-1)/2) - ceil(n/2) > ceil(n/2).
    """
    half_up = (dims.n + 1) // 2
    return dims.column_count // 2 - half_up, half_up


def construction_feasible(dims: BoardDims) -> bool:
    if dims.d < 2:
        return False
    if dims.n % 2 == 0:
        return True
    have, need = construction_slack(dims)
    return have > need


def construct_c2t_play_for_layered(base: Coloring, f: LayerAssignment) -> Play:
    """A gravity-legal full play whose terminal position is the layered coloring.

    Layers are filled bottom up in (First-colored, Second-colored) move pairs,
    so the play stays balanced after every pair.  A layer with more cells of
    one color leaves a monochromatic surplus unclaimed; on the next layer
    each surplus cell is paired with an opposite-colored cell of a column
    outside the surplus (smallest column first), after which the rest of
    that layer is paired off and its own surplus is carried up.  For even n
    the surplus is always empty.  For odd n the single cell left on top is
    First's last move.
    """
    dims = _check_layer_inputs(base, f)
    n = dims.n
    if n % 2 == 1 and not construction_feasible(dims):
        have, need = construction_slack(dims)
        raise PreconditionError(
            f"odd-n construction on {dims} needs floor(n^(d-1)/2) - ceil(n/2) = {have} "
            f"> ceil(n/2) = {need}")
    sub = base.dims
    columns = sorted(sub.cells())
    raw = {p: base.labels[cell_index(sub, p)] for p in columns}

    def color(p, level):
        return 3 - raw[p] if f.flipped(level) else raw[p]

    play: list[tuple[int, ...]] = []

    def pair(a, b):
        # a and b are (prefix, level) of opposite colors; First's cell goes first
        if color(*a) != Player.FIRST:
            a, b = b, a
        play.append(a[0] + (a[1],))
        play.append(b[0] + (b[1],))

    surplus: list[tuple[int, ...]] = []
    for level in range(1, n + 1):
        used = set()
        if surplus:
            held = set(surplus)
            c = color(surplus[0], level - 1)
            partners = [p for p in columns if p not in held and color(p, level) != c]
            if len(partners) < len(surplus):
                raise AssertionError(
                    f"layer {level}: {len(surplus)} surplus cells, {len(partners)} partners")
            for chi, p in zip(surplus, partners):
                pair((chi, level - 1), (p, level))
                used.add(p)
        rest = [p for p in columns if p not in used]
        firsts = [p for p in rest if color(p, level) == Player.FIRST]
        seconds = [p for p in rest if color(p, level) == Player.SECOND]
        k = min(len(firsts), len(seconds))
        for a, b in zip(firsts[:k], seconds[:k]):
            pair((a, level), (b, level))
        surplus = firsts[k:] or seconds[k:]
    if n % 2 == 0:
        assert not surplus
    else:
        if len(surplus) != 1 or color(surplus[0], n) != Player.FIRST:
            raise AssertionError(f"top layer left {len(surplus)} unpaired cells")
        play.append(surplus[0] + (n,))
    return tuple(play)


def cross_layer_lines(dims: BoardDims) -> list[GeometricLine]:
    """Non-column lines meeting every layer once, oriented bottom to top.

    Cell ``l`` of each returned line lies in layer ``l``.  There are
    (n+2)^(d-1) - n^(d-1) of them.
    """
    out = []
    for g in enumerate_lines(dims):
        if g.direction[-1] != 0 and any(g.direction[:-1]):
            out.append(g if g.direction[-1] == 1 else g.reversed())
    return out


@dataclass(frozen=True)
class GreedyStep:
    layer: int
    k_before: int
    x: int  # surviving lines whose consecutive cells share a base color
    y: int
    choice: LayerKind
    k_after: int

    def to_json(self) -> dict:
        return {"layer": self.layer, "k_before": self.k_before, "x": self.x, "y": self.y,
                "choice": self.choice.value, "k_after": self.k_after}


@dataclass(frozen=True)
class GreedyResult:
    assignment: LayerAssignment | None
    trace: tuple[GreedyStep, ...]
    coloring: Coloring | None
    reason: str = ""
    k_initial: int = 0
    swapped: bool = field(default=False)

    @property
    def success(self) -> bool:
        return self.assignment is not None

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "reason": self.reason,
            "k_initial": self.k_initial,
            "swapped": self.swapped,
            "assignment": self.assignment.to_string() if self.assignment else None,
            "trace": [s.to_json() for s in self.trace],
            "coloring": self.coloring.to_string() if self.coloring else None,
        }


def greedy_layer_assignment(base: Coloring) -> GreedyResult:
    """Choose Base/Flipped per layer to break every cross-layer line.

    Layer 1 is Base.  Going up, the lines still monochromatic so far split
    into ``x`` (next cell has the same base color as the current one, killed
    by flipping relative to the layer below) and ``y`` (killed by
    repeating).  The larger group is killed, ties repeat.  Once nothing
    survives, the free layers top up the Base/Flipped quotas.  If the choices
    made overshoot a quota, the globally flipped assignment is tried; failing
    both, or running out of layers, is reported as a failed result.
    """
    if not is_halving(base):
        raise PreconditionError("greedy assignment needs a halving layer coloring")
    if not is_proper(base):
        raise PreconditionError("greedy assignment needs a proper layer coloring")
    sub = base.dims
    n = sub.n
    dims = BoardDims(n, sub.d + 1)
    raw = [[base.labels[cell_index(sub, c[:-1])] for c in g.cells]
           for g in cross_layer_lines(dims)]
    alive = list(range(len(raw)))
    kinds = [LayerKind.BASE]
    trace = []
    for level in range(2, n + 1):
        if not alive:
            break
        same = [j for j in alive if raw[j][level - 2] == raw[j][level - 1]]
        x = len(same)
        y = len(alive) - x
        prev = kinds[-1]
        if y >= x:
            choice = prev
            alive = same
        else:
            choice = LayerKind.FLIPPED if prev is LayerKind.BASE else LayerKind.BASE
            alive = [j for j in alive if raw[j][level - 2] != raw[j][level - 1]]
        kinds.append(choice)
        trace.append(GreedyStep(level, x + y, x, y, choice, len(alive)))
    trace = tuple(trace)
    if alive:
        return GreedyResult(None, trace, None, f"{len(alive)} cross-layer lines survive "
                            f"all {n} layers", len(raw))
    quota = {LayerKind.BASE: (n + 1) // 2, LayerKind.FLIPPED: n // 2}
    swapped = False
    for attempt in (kinds, [_other(k) for k in kinds]):
        nb = attempt.count(LayerKind.BASE)
        nf = len(attempt) - nb
        if nb <= quota[LayerKind.BASE] and nf <= quota[LayerKind.FLIPPED]:
            full = attempt + [LayerKind.BASE] * (quota[LayerKind.BASE] - nb) \
                + [LayerKind.FLIPPED] * (quota[LayerKind.FLIPPED] - nf)
            f = LayerAssignment(tuple(full))
            return GreedyResult(f, trace, layered_coloring(base, f), "", len(raw), swapped)
        swapped = True
    return GreedyResult(None, trace, None, "flip budget exceeded", len(raw))


def _other(k: LayerKind) -> LayerKind:
    return LayerKind.FLIPPED if k is LayerKind.BASE else LayerKind.BASE


class Variant(enum.Enum):
    ALL = "all"
    HALVING = "halving"
    C2T = "c2t"


@dataclass(frozen=True)
class HJSearchResult:
    n: int
    d: int
    variant: Variant
    space: int
    witness: Coloring | None

    @property
    def exists(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d, "variant": self.variant.value,
                "space": str(self.space),
                "result": "ProperExists" if self.exists else "NoneExists",
                "witness": self.witness.to_string() if self.witness else None}


def _first_proper_in_range(r: range, masks: Sequence[int]) -> int | None:
    for s in r:
        if _mask_is_proper(s, masks):
            return s
    return None


def _first_proper_in_list(candidates: Sequence[int], masks: Sequence[int]) -> int | None:
    for s in candidates:
        if _mask_is_proper(s, masks):
            return s
    return None


def _same_popcount_masks(size: int, k: int) -> Iterable[int]:
    """All size-bit masks with k bits set, ascending (Gosper's hack)."""
    if k == 0:
        yield 0
        return
    s = (1 << k) - 1
    limit = 1 << size
    while s < limit:
        yield s
        c = s & -s
        r = s + c
        s = (((r ^ s) >> 2) // c) | r


def hj_variant_search(n: int, d: int, variant: Variant | str, cap: int = 10**6,
                      threads: int = 1) -> HJSearchResult:
    """Exhaustively decide whether a proper coloring exists in a coloring class.

    ``ALL`` ranges over every 2-coloring, ``HALVING`` over halving colorings
    and ``C2T`` over the terminal positions reachable by gravity play.
    """
    from .counting import tp_masks

    variant = Variant(variant) if not isinstance(variant, Variant) else variant
    dims = BoardDims(n, d)
    masks = line_set(dims).masks
    size = dims.size
    workers = max(1, threads)
    if variant is Variant.ALL:
        space = 1 << size
        if space > cap:
            raise ResourceLimitError(f"2^{size} colorings exceeds the cap of {cap}")
        parts = chunk_ranges(space, workers * 4 if workers > 1 else 1)
        found = pmap(partial(_first_proper_in_range, masks=masks), parts, workers)
    else:
        if variant is Variant.HALVING:
            space = math.comb(size, size // 2)
            if space > cap:
                raise ResourceLimitError(f"{space} halving colorings exceeds the cap of {cap}")
            candidates = list(_same_popcount_masks(size, (size + 1) // 2))
        else:
            candidates = sorted(tp_masks(dims, cap))
            space = len(candidates)
        chunks = [candidates[r.start:r.stop]
                  for r in chunk_ranges(len(candidates), workers * 4 if workers > 1 else 1)]
        found = pmap(partial(_first_proper_in_list, masks=masks), chunks, workers)
    hits = [s for s in found if s is not None]
    witness = Coloring.from_mask(dims, min(hits)) if hits else None
    return HJSearchResult(n, d, variant, space, witness)


@dataclass(frozen=True)
class LowerBound:
    n: int
    expression: str
    value: float | None

    @property
    def applicable(self) -> bool:
        return self.value is not None

    def to_json(self) -> dict:
        return {"n": self.n, "expression": self.expression,
                "value": self.value, "applicable": self.applicable}


def hj_c2t_lower_bound(n: int) -> LowerBound:
    """(n - 6) / (4 log2 n); positive, hence informative, only for n >= 7."""
    if n < 1:
        raise PreconditionError("n must be positive")
    expr = f"({n}-6)/(4*log2({n}))"
    if n == 1:
        return LowerBound(n, expr, None)
    return LowerBound(n, expr, (n - 6) / (4 * math.log2(n)))


def greedy_budget_holds(n: int, d: int) -> bool:
    """Whether log2((n+2)^(d-1) - n^(d-1)) + 2 <= floor(n/2).

    When it holds, halving the surviving cross-layer lines once per free
    layer is enough to break them all before the flip budget runs out.
    """
    k = (n + 2) ** (d - 1) - n ** (d - 1)
    if k <= 0:
        return True
    return math.log2(k) + 2 <= n // 2
