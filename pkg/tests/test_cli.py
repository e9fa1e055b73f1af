import io
import json
import subprocess
import sys

import pytest

from connect_tac_toe.board import BoardDims, GeometricLine
from connect_tac_toe.cli import interactive_play, main
from connect_tac_toe.coloring import Coloring, is_proper, layered_coloring, LayerAssignment
from connect_tac_toe.game import Mode, Player, is_play_valid, terminal_position


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_lines_json():
    code, text = run("lines", "--n", "3", "--d", "2")
    assert code == 0
    lines = [GeometricLine.from_json(o) for o in json.loads(text)]
    assert len(lines) == 8


def test_lines_csv_and_text():
    code, text = run("lines", "--n", "2", "--d", "2", "--format", "csv")
    assert code == 0 and text.splitlines()[0] == "id,cells,direction"
    assert len(text.splitlines()) == 7
    code, text = run("lines", "--n", "2", "--d", "2", "--format", "text")
    assert code == 0 and text.strip()


def test_count_plays_verify():
    code, text = run("count-plays", "--n", "3", "--d", "2", "--mode", "c2t", "--verify")
    obj = json.loads(text)
    assert code == 0 and obj["enumerated"] == "1680" and obj["match"] is True


def test_count_plays_hits_cap():
    code, _ = run("count-plays", "--n", "3", "--d", "2", "--verify", "--cap", "10")
    assert code == 3


@pytest.mark.parametrize("argv", [
    ["lines", "--n", "0", "--d", "2"],
    ["lines", "--n", "3"],
    ["solve", "--n", "2", "--d", "2", "--mode", "5t"],
    ["nonsense"],
    ["lines", "--n", "2", "--d", "2", "--threads", "0"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_enumerate_tp():
    code, text = run("enumerate-tp", "--n", "2", "--d", "2", "--list")
    obj = json.loads(text)
    assert code == 0 and obj["count"] == 5 and obj["strict_subset"] is True


def test_construct_round_trip():
    code, text = run("construct", "--n", "2", "--d", "2", "--coloring", "2,1:XO",
                     "--assignment", "BF")
    assert code == 0
    obj = json.loads(text)
    dims = BoardDims(2, 2)
    play = [tuple(c) for c in obj["play"]]
    assert is_play_valid(play, dims, Mode.GRAVITY)
    assert terminal_position(play, dims) == layered_coloring(
        Coloring.from_string("2,1:XO"), LayerAssignment.from_string("BF"))


def test_construct_infeasible():
    assert run("construct", "--n", "3", "--d", "2")[0] == 2


def test_greedy_cli():
    code, text = run("greedy", "--n", "5", "--d", "2", "--coloring", "5,1:XOXOX")
    obj = json.loads(text)
    assert code == 0 and obj["success"] is True
    assert is_proper(Coloring.from_string(obj["coloring"]))


def test_hj_search_cli():
    code, text = run("hj-search", "--n", "3", "--d", "2", "--variant", "c2t")
    obj = json.loads(text)
    assert code == 0 and obj["results"][0]["result"] == "ProperExists"
    assert obj["lower_bound"]["applicable"]


def test_solve_cli():
    code, text = run("solve", "--n", "3", "--d", "2", "--mode", "3t")
    obj = json.loads(text)
    assert code == 0 and obj["value"] == "Draw" and obj["plies"] == 9
    code, text = run("solve", "--n", "3", "--d", "2", "--position", "3,2:XOXO.....")
    assert code == 0 and json.loads(text)["value"] == "FirstWin"


def test_verify_cap_zero_skips_everything():
    code, text = run("verify", "--cap", "0")
    obj = json.loads(text)
    assert code == 3 and obj["executed"] == 0
    assert {c["status"] for c in obj["checks"]} == {"SKIPPED"}


def test_verify_fault_injection():
    code, text = run("verify", "--cap", "3000", "--inject-fault", "multinomial")
    obj = json.loads(text)
    status = {c["key"]: c["status"] for c in obj["checks"]}
    assert code == 1 and status["play-count"] == "FAIL"


def play_session(inputs, n=3, d=2, mode=Mode.GRAVITY, human=Player.FIRST):
    out = io.StringIO()
    summary = interactive_play(BoardDims(n, d), mode, human, io.StringIO(inputs), out)
    return summary, out.getvalue()


def test_interactive_messages():
    summary, text = play_session("2 2\n1\n1\n1\n")
    assert "floating: try again" in text
    assert "occupied: try again" in text
    assert summary["result"] == "abandoned" and "game abandoned" in text
    assert summary["moves"][0] == [1, 1]


def test_interactive_win_announced():
    # on 2x2 the first player always completes a line
    summary, text = play_session("1\n2\n1\n2\n", n=2, d=2)
    assert summary["result"] == "FirstWin"
    assert "X completes a line: you win" in text


def test_interactive_engine_wins_as_first():
    summary, text = play_session("1\n2\n1\n2\n", n=2, d=2, human=Player.SECOND)
    assert summary["result"] == "FirstWin" and "engine wins" in text


def test_interactive_unrestricted_full_coordinates():
    summary, text = play_session("1 1\nfoo\n", mode=Mode.UNRESTRICTED)
    assert "cannot read" in text and summary["moves"][0] == [1, 1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "connect_tac_toe", "lines", "--n", "1", "--d", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and len(json.loads(proc.stdout)) == 1
