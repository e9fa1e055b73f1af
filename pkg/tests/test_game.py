import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from connect_tac_toe.board import BoardDims, cell_at, line_set
from connect_tac_toe.errors import IllegalMoveError, OverfullColumnError, PreconditionError
from connect_tac_toe.game import (EMPTY, Mode, Player, Position, apply_move, available_moves,
                                  columns_as_play, columns_to_json, find_winning_line,
                                  first_invalid_move, is_play_valid, play_as_columns,
                                  play_from_json, play_to_json, replay, terminal_position)

D33 = BoardDims(3, 3)
D32 = BoardDims(3, 2)
EXAMPLE_PLAY = ((1, 1, 1), (1, 1, 2), (2, 2, 1), (3, 3, 1), (1, 1, 3))


def random_gravity_play(dims, rng, length=None):
    pos = Position.empty(dims)
    play = []
    for _ in range(dims.size if length is None else length):
        cell = rng.choice(available_moves(pos, Mode.GRAVITY))
        play.append(cell)
        pos = apply_move(pos, cell, Mode.GRAVITY)
    return tuple(play)


def test_example_play_availability():
    pos = replay(EXAMPLE_PLAY, D33, Mode.GRAVITY)
    expected = {(2, 2, 2), (3, 3, 2)} | {
        (x, y, 1) for x in (1, 2, 3) for y in (1, 2, 3) if (x, y) not in {(1, 1), (2, 2), (3, 3)}}
    got = available_moves(pos, Mode.GRAVITY)
    assert set(got) == expected and len(got) == 8


def test_empty_gravity_board_offers_layer_one():
    assert set(available_moves(Position.empty(D33), Mode.GRAVITY)) == \
        {(x, y, 1) for x in (1, 2, 3) for y in (1, 2, 3)}


def test_unrestricted_availability_is_complement():
    pos = replay([(1, 1), (2, 2), (3, 3), (1, 2), (2, 1)], D32, Mode.UNRESTRICTED)
    assert set(available_moves(pos, Mode.UNRESTRICTED)) == {(1, 3), (2, 3), (3, 1), (3, 2)}


def test_apply_move_examples():
    pos = apply_move(Position.empty(D32), (2, 1), Mode.GRAVITY)
    assert pos.label((2, 1)) == Player.FIRST and pos.move_count == 1
    assert pos.to_move is Player.SECOND
    pos = apply_move(Position.empty(D32), (2, 2), Mode.UNRESTRICTED)
    assert pos.label((2, 2)) == Player.FIRST


@pytest.mark.parametrize("start,cell,mode,reason", [
    ((), (2, 2), Mode.GRAVITY, "floating"),
    (((2, 1),), (2, 1), Mode.GRAVITY, "occupied"),
    (((2, 1),), (2, 1), Mode.UNRESTRICTED, "occupied"),
    ((), (4, 1), Mode.GRAVITY, "out of range"),
    ((), (1, 1, 1), Mode.UNRESTRICTED, "out of range"),
])
def test_apply_move_errors(start, cell, mode, reason):
    pos = replay(start, D32, mode)
    with pytest.raises(IllegalMoveError) as exc:
        apply_move(pos, cell, mode)
    assert exc.value.reason == reason


def test_apply_move_is_pure():
    pos = Position.empty(D32)
    apply_move(pos, (1, 1), Mode.GRAVITY)
    assert pos == Position.empty(D32)


def test_play_validity_examples():
    assert is_play_valid(EXAMPLE_PLAY, D33, Mode.GRAVITY)
    assert first_invalid_move([(1, 1, 2)], D33, Mode.GRAVITY) == (0, "floating")
    perm = list(D32.cells())
    random.Random(3).shuffle(perm)
    assert is_play_valid(perm, D32, Mode.UNRESTRICTED)
    assert first_invalid_move([(1, 1), (1, 1)], D32, Mode.UNRESTRICTED) == (1, "occupied")


def test_columns_as_play_example():
    cols = [(1, 1), (1, 1), (2, 2), (3, 3), (1, 1)]
    assert columns_as_play(cols, D33) == EXAMPLE_PLAY
    assert play_as_columns(EXAMPLE_PLAY) == cols


def test_columns_n1():
    dims = BoardDims(1, 3)
    cols = [(1, 1)]
    assert columns_as_play(cols, dims) == ((1, 1, 1),)


def test_overfull_column():
    with pytest.raises(OverfullColumnError):
        columns_as_play([(1,), (1,), (1,), (1,)], D32)


def test_column_round_trip_random_plays():
    rng = random.Random(11)
    for _ in range(1000):
        play = random_gravity_play(D32, rng)
        assert columns_as_play(play_as_columns(play), D32) == play


@settings(deadline=None, max_examples=60)
@given(st.sampled_from([(2, 2), (3, 2), (2, 3), (3, 3), (4, 2), (2, 1), (4, 1)]),
       st.randoms(use_true_random=False), st.data())
def test_gravity_invariants(nd, rng, data):
    dims = BoardDims(*nd)
    length = data.draw(st.integers(0, dims.size))
    play = random_gravity_play(dims, rng, length)
    pos = replay(play, dims, Mode.GRAVITY)
    # a gravity play is also a legal unrestricted play
    assert is_play_valid(play, dims, Mode.UNRESTRICTED)
    avail = available_moves(pos, Mode.GRAVITY)
    assert len({c[:-1] for c in avail}) == len(avail)
    for col in dims.columns():
        heights = [pos.label(col + (h,)) != EMPTY for h in range(1, dims.n + 1)]
        # claimed cells are a bottom prefix of the column
        assert heights == sorted(heights, reverse=True)
        has_move = any(c[:-1] == col for c in avail)
        assert has_move == (not all(heights))
    # replaying from scratch matches the incremental construction
    x = sum(1 for k in range(length) if k % 2 == 0)
    assert pos.labels.count(Player.FIRST) == x and pos.move_count == length


def test_find_winning_line():
    ls = line_set(D32)
    pos = Position(D32, tuple(Player.FIRST if cell_at(D32, i) in {(1, 1), (2, 2), (3, 3)}
                              else Player.SECOND if cell_at(D32, i) in {(1, 2), (2, 1)}
                              else EMPTY for i in range(9)))
    lid, who = find_winning_line(pos)
    assert set(ls[lid].cells) == {(1, 1), (2, 2), (3, 3)} and who is Player.FIRST
    assert find_winning_line(Position.empty(D32)) is None
    pos = replay([(1, 1), (3, 3), (1, 2)], D32, Mode.UNRESTRICTED)
    assert find_winning_line(pos) is None


def test_terminal_position():
    rng = random.Random(5)
    dims = BoardDims(2, 2)
    for _ in range(10):
        c = terminal_position(random_gravity_play(dims, rng), dims)
        assert c.count(Player.FIRST) == 2 and c.count(Player.SECOND) == 2
    one = BoardDims(2, 1)
    c = terminal_position(columns_as_play([(), ()], one), one)
    assert c.at((1,)) is Player.FIRST and c.at((2,)) is Player.SECOND
    with pytest.raises(PreconditionError):
        terminal_position([(1,)], one)
    with pytest.raises(PreconditionError):
        terminal_position([(2,), (1,)], one, Mode.GRAVITY)


def test_position_invariants_enforced():
    with pytest.raises(PreconditionError):
        Position(D32, (Player.SECOND,) + (EMPTY,) * 8)
    with pytest.raises(PreconditionError):
        Position(D32, (Player.FIRST,) * 2 + (EMPTY,) * 7)


def test_position_hash_ignores_history():
    a = replay([(1, 1), (2, 1), (3, 1)], D32, Mode.GRAVITY)
    b = replay([(3, 1), (2, 1), (1, 1)], D32, Mode.GRAVITY)
    assert a == b and hash(a) == hash(b)


def test_position_string_round_trip():
    pos = replay(EXAMPLE_PLAY, D33, Mode.GRAVITY)
    s = pos.to_string()
    assert s.startswith("3,3:X") and len(s) == len("3,3:") + 27
    assert Position.from_string(s) == pos
    with pytest.raises(PreconditionError):
        Position.from_string("3,3:XQ")


def test_play_json():
    text = json.dumps(play_to_json(EXAMPLE_PLAY))
    assert play_from_json(json.loads(text), D33) == EXAMPLE_PLAY
    assert columns_to_json(EXAMPLE_PLAY) == [[1, 1], [1, 1], [2, 2], [3, 3], [1, 1]]


def test_all_unrestricted_permutations_valid():
    dims = BoardDims(2, 2)
    for perm in itertools.permutations(dims.cells()):
        assert is_play_valid(perm, dims, Mode.UNRESTRICTED)
