import itertools
import math

import pytest

from connect_tac_toe.board import BoardDims
from connect_tac_toe.coloring import Coloring, is_halving
from connect_tac_toe.counting import (CountReport, count_plays_report, enumerate_plays,
                                      enumerate_tp, multinomial, play_count_formula,
                                      tp_count_formula, tp_masks)
from connect_tac_toe.errors import ResourceLimitError
from connect_tac_toe.game import (Mode, Player, Position, apply_move, available_moves,
                                  is_play_valid, terminal_position)


def cell_level_plays(dims):
    """Every gravity play, grown cell by cell through available_moves."""
    out = []

    def walk(pos, prefix):
        if pos.is_full:
            out.append(tuple(prefix))
            return
        for c in available_moves(pos, Mode.GRAVITY):
            walk(apply_move(pos, c, Mode.GRAVITY), prefix + [c])

    walk(Position.empty(dims), [])
    return out


def test_multinomial():
    assert multinomial(2, 2) == 6
    assert multinomial(3, 3, 3) == 1680
    assert multinomial(2, 2, 2, 2) == 2520
    assert multinomial() == 1


@pytest.mark.parametrize("n,d,expected", [(2, 2, 6), (3, 2, 1680), (2, 3, 2520)])
def test_gravity_play_counts(n, d, expected):
    dims = BoardDims(n, d)
    assert play_count_formula(dims, Mode.GRAVITY) == expected
    assert math.factorial(dims.size) // math.factorial(n) ** dims.column_count == expected
    assert enumerate_plays(dims, Mode.GRAVITY) == expected
    assert len(cell_level_plays(dims)) == expected


def test_2x2_gravity_plays_by_permutation_filter():
    dims = BoardDims(2, 2)
    valid = [p for p in itertools.permutations(dims.cells())
             if is_play_valid(p, dims, Mode.GRAVITY)]
    assert len(valid) == 6


@pytest.mark.parametrize("n,d", [(1, 1), (1, 3), (2, 2), (2, 1)])
def test_unrestricted_counts(n, d):
    dims = BoardDims(n, d)
    assert enumerate_plays(dims, Mode.UNRESTRICTED) == math.factorial(dims.size)
    assert play_count_formula(dims, Mode.UNRESTRICTED) == math.factorial(dims.size)


def test_single_cell_one_play():
    for mode in Mode:
        assert enumerate_plays(BoardDims(1, 1), mode) == 1
        assert play_count_formula(BoardDims(1, 4), mode) == 1


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3), (4, 2), (3, 3), (5, 3)])
def test_play_count_quotient(n, d):
    dims = BoardDims(n, d)
    a = play_count_formula(dims, Mode.UNRESTRICTED)
    b = play_count_formula(dims, Mode.GRAVITY)
    assert a % b == 0 and a // b == math.factorial(n) ** dims.column_count


def test_sharded_enumeration_matches():
    dims = BoardDims(2, 3)
    assert enumerate_plays(dims, Mode.GRAVITY, threads=3) == 2520


def test_enumeration_cap():
    with pytest.raises(ResourceLimitError) as exc:
        enumerate_plays(BoardDims(3, 2), Mode.GRAVITY, cap=100)
    assert exc.value.partial is not None and exc.value.partial >= 100


def test_tp_formula():
    assert tp_count_formula(BoardDims(2, 2)) == 6
    assert tp_count_formula(BoardDims(3, 2)) == 126
    assert tp_count_formula(BoardDims(1, 1)) == 1


def test_unrestricted_tp_are_halvings():
    dims = BoardDims(3, 2)
    tps = enumerate_tp(dims, Mode.UNRESTRICTED)
    brute = {Coloring.from_mask(dims, s) for s in range(1 << 9) if bin(s).count("1") == 5}
    assert tps == brute and len(tps) == 126


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_gravity_tp_matches_play_enumeration(n, d):
    dims = BoardDims(n, d)
    from_plays = {terminal_position(p, dims) for p in cell_level_plays(dims)}
    assert enumerate_tp(dims, Mode.GRAVITY) == from_plays


@pytest.mark.parametrize("n,d", [(2, 2), (3, 2), (2, 3)])
def test_gravity_tp_strict_subset(n, d):
    dims = BoardDims(n, d)
    grav = enumerate_tp(dims, Mode.GRAVITY)
    assert grav < enumerate_tp(dims, Mode.UNRESTRICTED)
    assert len(grav) < tp_count_formula(dims)
    assert all(is_halving(c) for c in grav)
    for c in grav:
        assert any(c.at(col + (1,)) is Player.FIRST for col in dims.columns())


def test_2x2_missing_coloring():
    dims = BoardDims(2, 2)
    grav = enumerate_tp(dims, Mode.GRAVITY)
    bottom_all_o = Coloring.from_string("2,2:OOXX")
    assert bottom_all_o not in grav
    assert len(grav) == 5


def test_single_cell_tp():
    for mode in Mode:
        assert len(enumerate_tp(BoardDims(1, 1), mode)) == 1


def test_tp_cap():
    with pytest.raises(ResourceLimitError):
        tp_masks(BoardDims(3, 2), cap=5)
    with pytest.raises(ResourceLimitError):
        enumerate_tp(BoardDims(3, 2), Mode.UNRESTRICTED, cap=5)


def test_count_report_json():
    rep = count_plays_report(BoardDims(3, 2), Mode.GRAVITY, verify=True)
    obj = rep.to_json()
    assert obj["formula"] == "1680" and obj["enumerated"] == "1680" and obj["match"] is True
    assert set(obj) == {"n", "d", "mode", "formula", "enumerated", "match", "elapsed_ms"}
    bad = CountReport(BoardDims(2, 2), Mode.GRAVITY, 7, 6, 0.0)
    assert bad.discrepancy and bad.to_json(timing=False)["match"] is False
    big = count_plays_report(BoardDims(4, 3), Mode.UNRESTRICTED)
    assert big.to_json()["formula"] == str(math.factorial(64)) and big.match is None
