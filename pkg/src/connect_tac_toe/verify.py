"""One-shot reproduction sweep behind ``c2t verify``.

Every check only takes on instances whose size fits under ``cap``; a check
left with nothing to do is SKIPPED, never PASSED.  Output carries no
timings, so it is byte-identical for any worker count.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .board import BoardDims, enumerate_lines, line_count_formula
from .coloring import (LayerAssignment, Variant, construct_c2t_play_for_layered,
                       cross_layer_lines, greedy_layer_assignment, hj_variant_search, is_proper,
                       layered_coloring, random_halving, random_proper_halving)
from .counting import enumerate_plays, play_count_formula, tp_count_formula, tp_masks
from .game import Mode, Position, is_play_valid, terminal_position
from .solver import Outcome, Solver, SolverConfig, naive_value_table, solve

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"

# boards with at most 9 cells, the ones the naive oracle can sweep
SMALL_BOARDS = [(1, 1), (1, 2), (1, 3)] + [(n, 1) for n in range(2, 10)] + [(2, 2), (2, 3), (3, 2)]
PLAY_COUNT_BOARDS = [(1, 1), (1, 2), (2, 1), (3, 1), (2, 2), (2, 3), (3, 2)]
TP_BOARDS = [(2, 2), (3, 2), (2, 3)]
CONSTRUCTION_BOARDS = [(2, 2), (2, 3), (4, 2), (3, 4)]
GREEDY_BOARDS = [(5, 2), (6, 2), (4, 3), (5, 3), (6, 3), (8, 3)]
HJ_BOARDS = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2)]


@dataclass
class Check:
    key: str
    status: str = SKIPPED
    checked: int = 0
    detail: dict = field(default_factory=dict)

    def fail(self, why: str):
        self.status = FAIL
        self.detail.setdefault("failures", []).append(why)

    def finish(self):
        if self.status != FAIL:
            self.status = PASS if self.checked else SKIPPED

    def to_json(self) -> dict:
        return {"key": self.key, "status": self.status, "checked": self.checked,
                "detail": self.detail}


@dataclass
class Report:
    checks: list[Check]

    @property
    def executed(self) -> int:
        return sum(c.status != SKIPPED for c in self.checks)

    @property
    def passed(self) -> bool:
        return self.executed > 0 and all(c.status != FAIL for c in self.checks)

    def exit_code(self) -> int:
        if any(c.status == FAIL for c in self.checks):
            return 1
        return 0 if self.executed else 3

    def to_json(self) -> dict:
        return {"checks": [c.to_json() for c in self.checks], "executed": self.executed,
                "passed": self.passed}

    def table(self) -> str:
        rows = [f"{'check':<22} {'status':<8} {'checked':>8}"]
        for c in self.checks:
            rows.append(f"{c.key:<22} {c.status:<8} {c.checked:>8}")
        return "\n".join(rows)


def _line_count(cap: int) -> Check:
    chk = Check("line-count")
    for n in range(1, 6):
        for d in range(1, 5):
            if (n + 2) ** d > cap:
                continue
            dims = BoardDims(n, d)
            got = len(enumerate_lines(dims))
            want = line_count_formula(dims)
            chk.checked += 1
            if got != want:
                chk.fail(f"{dims}: enumerated {got}, formula {want}")
            if d >= 2:
                cross = len(cross_layer_lines(dims))
                if cross != (n + 2) ** (d - 1) - n ** (d - 1):
                    chk.fail(f"{dims}: {cross} cross-layer lines")
    chk.finish()
    return chk


def _play_count(cap: int, threads: int, fault: str | None) -> Check:
    chk = Check("play-count")
    rows = []
    for n, d in PLAY_COUNT_BOARDS:
        dims = BoardDims(n, d)
        for mode in (Mode.GRAVITY, Mode.UNRESTRICTED):
            formula = play_count_formula(dims, mode)
            if formula > cap:
                continue
            if fault == "multinomial" and mode is Mode.GRAVITY:
                formula += 1
            got = enumerate_plays(dims, mode, cap, threads)
            chk.checked += 1
            rows.append({"n": n, "d": d, "mode": mode.value, "formula": str(formula),
                         "enumerated": str(got)})
            if got != formula:
                chk.fail(f"{dims} {mode.value}: enumerated {got}, formula {formula}")
            if mode is Mode.GRAVITY and \
                    play_count_formula(dims, Mode.UNRESTRICTED) != formula * math.factorial(n) ** dims.column_count:
                chk.fail(f"{dims}: quotient of the two play counts is not (n!)^(n^(d-1))")
    chk.detail["boards"] = rows
    chk.finish()
    return chk


def _tp_strictness(cap: int) -> Check:
    chk = Check("tp-strictness")
    rows = []
    for n, d in TP_BOARDS:
        dims = BoardDims(n, d)
        total = tp_count_formula(dims)
        if total > cap:
            continue
        reach = tp_masks(dims, cap)
        chk.checked += 1
        rows.append({"n": n, "d": d, "tp_c2t": len(reach), "tp_3t": str(total)})
        if not len(reach) < total:
            chk.fail(f"{dims}: {len(reach)} gravity terminal positions, {total} halving")
        bottom = (1 << dims.column_count) - 1
        if any(not s & bottom for s in reach):
            chk.fail(f"{dims}: a gravity terminal position has layer 1 all O")
        if any(bin(s).count("1") != (dims.size + 1) // 2 for s in reach):
            chk.fail(f"{dims}: a gravity terminal position is not halving")
    chk.detail["boards"] = rows
    chk.finish()
    return chk


def _construction(cap: int, seed: int) -> Check:
    chk = Check("layered-construction")
    rng = random.Random(seed)
    count = min(200, cap)
    for k in range(count):
        n, d = CONSTRUCTION_BOARDS[k % len(CONSTRUCTION_BOARDS)]
        dims = BoardDims(n, d)
        base = random_halving(BoardDims(n, d - 1), rng)
        f = LayerAssignment.random(n, rng)
        play = construct_c2t_play_for_layered(base, f)
        chk.checked += 1
        if not is_play_valid(play, dims, Mode.GRAVITY):
            chk.fail(f"{dims} {base} {f.to_string()}: play not gravity-valid")
        elif terminal_position(play, dims) != layered_coloring(base, f):
            chk.fail(f"{dims} {base} {f.to_string()}: terminal position differs")
    chk.detail["boards"] = [f"{n},{d}" for n, d in CONSTRUCTION_BOARDS]
    chk.finish()
    return chk


def _greedy(cap: int, seed: int) -> Check:
    chk = Check("greedy-halving")
    rng = random.Random(seed + 1)
    count = min(100, cap)
    successes = 0
    for k in range(count):
        n, d = GREEDY_BOARDS[k % len(GREEDY_BOARDS)]
        base = random_proper_halving(BoardDims(n, d - 1), rng)
        res = greedy_layer_assignment(base)
        chk.checked += 1
        for step in res.trace:
            if step.k_after > step.k_before // 2:
                chk.fail(f"{base}: layer {step.layer} kept {step.k_after} of {step.k_before}")
        if res.success:
            successes += 1
            if not is_proper(res.coloring):
                chk.fail(f"{base}: greedy coloring has a monochromatic line")
    chk.detail["successes"] = successes
    chk.finish()
    return chk


def _hj(cap: int, threads: int) -> tuple[Check, Check]:
    chain = Check("hj-chain")
    threshold = Check("hj-threshold")
    results: dict[tuple[int, int], dict[Variant, bool]] = {}
    for n, d in HJ_BOARDS:
        dims = BoardDims(n, d)
        if 2 ** dims.size > cap:
            continue
        row = {v: hj_variant_search(n, d, v, cap, threads).exists for v in Variant}
        results[(n, d)] = row
        chain.checked += 1
        if row[Variant.C2T] and not row[Variant.HALVING]:
            chain.fail(f"{dims}: gravity-reachable proper coloring but no halving one")
        if row[Variant.HALVING] and not row[Variant.ALL]:
            chain.fail(f"{dims}: halving proper coloring but no proper coloring")
    for (n, d), row in results.items():
        up = results.get((n, d + 1))
        if up is None:
            continue
        threshold.checked += 1
        if not row[Variant.ALL] and up[Variant.ALL]:
            threshold.fail(f"n={n}: no proper coloring at d={d} but one at d={d + 1}")
    chain.detail["results"] = [
        {"n": n, "d": d, **{v.value: ("ProperExists" if e else "NoneExists") for v, e in row.items()}}
        for (n, d), row in results.items()]
    chain.finish()
    threshold.finish()
    return chain, threshold


def _oracle(cap: int) -> Check:
    chk = Check("solver-oracle")
    rows = []
    for n, d in SMALL_BOARDS:
        dims = BoardDims(n, d)
        if math.factorial(dims.size) > cap:
            continue
        for mode in Mode:
            table = naive_value_table(dims, mode)
            solver = Solver(dims, mode, SolverConfig(table_bits=12))
            bad = sum(solver.value(p) != v for p, v in table.items())
            chk.checked += 1
            rows.append({"n": n, "d": d, "mode": mode.value, "positions": len(table),
                         "mismatches": bad})
            if bad:
                chk.fail(f"{dims} {mode.value}: {bad} of {len(table)} positions disagree")
    chk.detail["boards"] = rows
    chk.finish()
    return chk


def _strategy_stealing(cap: int, threads: int) -> Check:
    chk = Check("strategy-stealing")
    rows = []
    for n, d in SMALL_BOARDS:
        dims = BoardDims(n, d)
        if math.factorial(dims.size) > cap:
            continue
        for mode in Mode:
            res = solve(Position.empty(dims), mode, SolverConfig(threads=threads))
            if mode is Mode.UNRESTRICTED:
                chk.checked += 1
                if res.value.outcome is Outcome.SECOND_WIN:
                    chk.fail(f"{dims} 3t: second player wins from the empty board")
            rows.append({"n": n, "d": d, "mode": mode.value, "value": res.value.outcome.label,
                         "plies": res.value.plies})
    chk.detail["values"] = rows
    chk.detail["gravity_second_wins"] = [
        f"{r['n']},{r['d']}" for r in rows if r["mode"] == "c2t" and r["value"] == "SecondWin"]
    chk.finish()
    return chk


def verify_suite(cap: int = 10**6, threads: int = 1, seed: int = 0,
                 fault: str | None = None) -> Report:
    checks = [
        _line_count(cap),
        _play_count(cap, threads, fault),
        _tp_strictness(cap),
        _construction(cap, seed),
        _greedy(cap, seed),
        *_hj(cap, threads),
        _oracle(cap),
        _strategy_stealing(cap, threads),
    ]
    return Report(checks)
