"""``c2t`` command line.

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 resource cap.
Results go to stdout (JSON unless ``--format`` says otherwise), diagnostics
to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from typing import TextIO

from .board import BoardDims, cell_at, column_cells, enumerate_lines, layer_cells, lines_to_json
from .coloring import (Coloring, LayerAssignment, Variant, construct_c2t_play_for_layered,
                       greedy_layer_assignment, hj_c2t_lower_bound, hj_variant_search, is_proper,
                       layered_coloring, random_halving, random_proper_halving)
from .counting import count_plays_report, enumerate_tp, tp_count_formula
from .errors import C2TError, IllegalMoveError, PreconditionError, ResourceLimitError
from .game import (EMPTY, Mode, Player, Position, apply_move, columns_to_json, find_winning_line,
                   is_play_valid, play_to_json, terminal_position)
from .solver import Solver, SolverConfig, limited_best_move, solve
from .verify import verify_suite

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

DEFAULT_ENUM_CAP = 10**6
DEFAULT_NODE_CAP = 10**8


class UsageError(Exception):
    pass


def _emit(out: TextIO, fmt: str, payload, rows=None, text=None):
    if fmt == "json":
        json.dump(payload, out, sort_keys=False)
        out.write("\n")
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in rows if rows is not None else [list(payload.keys()), list(payload.values())]:
            w.writerow(r)
        out.write(buf.getvalue())
    else:
        out.write((text if text is not None else json.dumps(payload, indent=2)) + "\n")


def _dims(args) -> BoardDims:
    if args.n is None or args.d is None:
        raise UsageError("--n and --d are required")
    try:
        return BoardDims(args.n, args.d)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None


def _cap(args, default: int) -> int:
    cap = default if args.cap is None else args.cap
    if cap < 0:
        raise UsageError("--cap must be non-negative")
    return cap


def cmd_lines(args, out):
    dims = _dims(args)
    lines = enumerate_lines(dims, max(_cap(args, DEFAULT_ENUM_CAP), 1))
    rows = [["id", "cells", "direction"]] + [
        [i, "|".join(" ".join(map(str, c)) for c in g.cells), " ".join(map(str, g.direction))]
        for i, g in enumerate(lines)]
    text = "\n".join(f"{i}: {' '.join(str(c) for c in g.cells)}  direction={g.direction}"
                     for i, g in enumerate(lines))
    _emit(out, args.format, lines_to_json(lines), rows, text)
    return EXIT_OK


def cmd_count_plays(args, out):
    dims = _dims(args)
    report = count_plays_report(dims, Mode.parse(args.mode), args.verify,
                                _cap(args, DEFAULT_ENUM_CAP), args.threads)
    payload = report.to_json()
    _emit(out, args.format, payload,
          text=f"{dims} {report.mode.value}: formula {report.formula_value}"
               + ("" if report.enumerated_value is None
                  else f", enumerated {report.enumerated_value}, match={report.match}"))
    return EXIT_MISMATCH if report.discrepancy else EXIT_OK


def cmd_enumerate_tp(args, out):
    dims = _dims(args)
    mode = Mode.parse(args.mode)
    colorings = sorted(enumerate_tp(dims, mode, _cap(args, DEFAULT_ENUM_CAP)), key=lambda c: c.mask)
    total = tp_count_formula(dims)
    halving = all(c.count(Player.FIRST) == (dims.size + 1) // 2 for c in colorings)
    payload = {"n": dims.n, "d": dims.d, "mode": mode.value, "count": len(colorings),
               "halving_count": str(total), "all_halving": halving,
               "strict_subset": len(colorings) < total}
    if args.list:
        payload["colorings"] = [c.to_string() for c in colorings]
    _emit(out, args.format, payload,
          text=f"{dims} {mode.value}: {len(colorings)} terminal positions of {total} halving")
    return EXIT_OK if halving else EXIT_MISMATCH


def _layer_coloring(args, dims: BoardDims, rng: random.Random, proper: bool) -> Coloring:
    sub = BoardDims(dims.n, dims.d - 1)
    if args.coloring:
        c = Coloring.from_string(args.coloring)
        if c.dims != sub:
            raise UsageError(f"layer coloring must be on {sub}, got {c.dims}")
        return c
    return random_proper_halving(sub, rng) if proper else random_halving(sub, rng)


def cmd_construct(args, out):
    dims = _dims(args)
    if dims.d < 2:
        raise UsageError("construct needs d >= 2")
    rng = random.Random(args.seed)
    base = _layer_coloring(args, dims, rng, proper=False)
    f = LayerAssignment.from_string(args.assignment) if args.assignment \
        else LayerAssignment.random(dims.n, rng)
    play = construct_c2t_play_for_layered(base, f)
    valid = is_play_valid(play, dims, Mode.GRAVITY)
    target = layered_coloring(base, f)
    matches = valid and terminal_position(play, dims) == target
    payload = {"n": dims.n, "d": dims.d, "layer_coloring": base.to_string(),
               "assignment": f.to_string(), "target": target.to_string(),
               "play": play_to_json(play), "columns": columns_to_json(play),
               "valid": valid, "matches": matches}
    _emit(out, args.format, payload,
          text=f"{target}\nvalid={valid} matches={matches}\n"
               + " ".join(",".join(map(str, c)) for c in play))
    return EXIT_OK if matches else EXIT_MISMATCH


def cmd_greedy(args, out):
    dims = _dims(args)
    if dims.d < 2:
        raise UsageError("greedy needs d >= 2")
    base = _layer_coloring(args, dims, random.Random(args.seed), proper=True)
    res = greedy_layer_assignment(base)
    payload = {"n": dims.n, "d": dims.d, "layer_coloring": base.to_string(), **res.to_json()}
    ok = all(s.k_after <= s.k_before // 2 for s in res.trace)
    if res.success:
        payload["proper"] = is_proper(res.coloring)
        ok = ok and payload["proper"]
    _emit(out, args.format, payload,
          text="\n".join([f"layer {s.layer}: k {s.k_before} -> {s.k_after} "
                          f"(x={s.x}, y={s.y}, {s.choice.value})" for s in res.trace]
                         + [f"success={res.success} {res.reason}".rstrip()]))
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_hj_search(args, out):
    dims = _dims(args)
    cap = _cap(args, DEFAULT_ENUM_CAP)
    variants = [Variant(args.variant)] if args.variant else list(Variant)
    results = [hj_variant_search(dims.n, dims.d, v, cap, args.threads) for v in variants]
    exists = {r.variant: r.exists for r in results}
    chain_ok = not (exists.get(Variant.C2T) and exists.get(Variant.HALVING) is False) and \
        not (exists.get(Variant.HALVING) and exists.get(Variant.ALL) is False)
    payload = {"results": [r.to_json() for r in results], "chain_ok": chain_ok,
               "lower_bound": hj_c2t_lower_bound(dims.n).to_json()}
    rows = [["n", "d", "variant", "space", "result", "witness"]] + [
        [r.n, r.d, r.variant.value, r.space, "ProperExists" if r.exists else "NoneExists",
         r.witness.to_string() if r.witness else ""] for r in results]
    _emit(out, args.format, payload, rows,
          "\n".join(f"{r.variant.value:<8} {'ProperExists' if r.exists else 'NoneExists'}"
                    f" {r.witness or ''}" for r in results))
    return EXIT_OK if chain_ok else EXIT_MISMATCH


def cmd_solve(args, out):
    dims = _dims(args)
    mode = Mode.parse(args.mode)
    pos = Position.from_string(args.position) if args.position else Position.empty(dims)
    if pos.dims != dims:
        raise UsageError(f"position is on {pos.dims}, flags say {dims}")
    config = SolverConfig(seed=args.seed, node_cap=_cap(args, DEFAULT_NODE_CAP),
                          threads=args.threads)
    res = solve(pos, mode, config)
    _emit(out, args.format, res.to_json(),
          text=f"{dims} {mode.value}: {res.value}  pv: "
               + " ".join(",".join(map(str, c)) for c in res.principal_variation))
    return EXIT_OK


def cmd_verify(args, out):
    report = verify_suite(_cap(args, DEFAULT_ENUM_CAP), args.threads, args.seed,
                          args.inject_fault)
    if args.format == "json":
        _emit(out, "json", report.to_json())
        print(report.table(), file=sys.stderr)
    elif args.format == "csv":
        _emit(out, "csv", None, [["key", "status", "checked"]]
              + [[c.key, c.status, c.checked] for c in report.checks])
    else:
        out.write(report.table() + "\n")
    for c in report.checks:
        if c.status == "FAIL":
            print(f"FAILED: {c.key}: {c.detail.get('failures')}", file=sys.stderr)
    return report.exit_code()


def render(pos: Position) -> str:
    """Layers stacked top to bottom, each drawn as an ASCII grid."""
    dims = pos.dims
    sym = {EMPTY: ".", Player.FIRST: "X", Player.SECOND: "O"}
    blocks = []
    for level in range(dims.n, 0, -1):
        cells = [sym[pos.labels[i]] for i in layer_cells(dims, level)]
        if dims.d <= 2:
            blocks.append(f"{level:>2} | " + " ".join(cells))
        else:
            rows = [" ".join(cells[r * dims.n:(r + 1) * dims.n]) for r in range(dims.n)]
            blocks.append(f"layer {level}\n" + "\n".join(rows))
    return "\n".join(blocks)


def _parse_move(text: str, pos: Position, mode: Mode):
    """Cell for a typed move: full coordinates, or a column prefix under gravity."""
    dims = pos.dims
    parts = text.replace(",", " ").split()
    try:
        coords = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"cannot read {text!r} as coordinates") from None
    if mode is Mode.GRAVITY and len(coords) == dims.d - 1:
        if any(not 1 <= x <= dims.n for x in coords):
            raise IllegalMoveError(IllegalMoveError.OUT_OF_RANGE, coords)
        free = [i for i in column_cells(dims, coords) if pos.labels[i] == EMPTY]
        if not free:
            raise IllegalMoveError(IllegalMoveError.OCCUPIED, coords)
        return cell_at(dims, free[0])
    if len(coords) != dims.d:
        raise UsageError(f"expected {dims.d} coordinates"
                         + (f" or a {dims.d - 1}-coordinate column" if mode is Mode.GRAVITY else ""))
    return coords


def interactive_play(dims: BoardDims, mode: Mode, human: Player, stdin: TextIO, out: TextIO,
                     depth: int | None = None, node_cap: int = DEFAULT_NODE_CAP) -> dict:
    """Text game between a human and the engine under the stop-at-win rule."""
    pos = Position.empty(dims)
    solver = Solver(dims, mode, SolverConfig(node_cap=node_cap))
    history = []
    while True:
        hit = find_winning_line(pos)
        if hit is not None or pos.is_full:
            break
        out.write(render(pos) + "\n")
        if pos.to_move is human:
            out.write(f"{human.symbol} to move> ")
            out.flush()
            line = stdin.readline()
            if not line:
                out.write("\ngame abandoned\n")
                return {"result": "abandoned", "moves": play_to_json(history)}
            try:
                cell = _parse_move(line.strip(), pos, mode)
                pos = apply_move(pos, cell, mode)
            except IllegalMoveError as exc:
                out.write(f"{exc.reason}: try again\n")
                continue
            except UsageError as exc:
                out.write(f"{exc}\n")
                continue
        else:
            try:
                solver.nodes = 0
                cell = solver.best_move(pos)
            except ResourceLimitError:
                if depth is None:
                    raise
                cell = limited_best_move(pos, mode, depth)
            out.write(f"engine plays {','.join(map(str, cell))}\n")
            pos = apply_move(pos, cell, mode)
        history.append(cell)
    out.write(render(pos) + "\n")
    if hit is not None:
        winner = hit[1]
        who = "you win" if winner is human else "engine wins"
        out.write(f"{winner.symbol} completes a line: {who}\n")
        result = "FirstWin" if winner is Player.FIRST else "SecondWin"
    else:
        out.write("board full: draw\n")
        result = "Draw"
    return {"result": result, "moves": play_to_json(history)}


def cmd_play(args, out):
    dims = _dims(args)
    if dims.d > 3:
        raise UsageError("interactive play draws at most 3 dimensions")
    summary = interactive_play(dims, Mode.parse(args.mode), Player.from_symbol(args.human),
                               sys.stdin, out, args.depth, _cap(args, DEFAULT_NODE_CAP))
    print(json.dumps(summary), file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "lines": cmd_lines,
    "count-plays": cmd_count_plays,
    "enumerate-tp": cmd_enumerate_tp,
    "construct": cmd_construct,
    "greedy": cmd_greedy,
    "hj-search": cmd_hj_search,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "play": cmd_play,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--mode", choices=["3t", "c2t"], default="c2t")
    common.add_argument("--cap", type=int, default=None,
                        help=f"enumeration cap (default {DEFAULT_ENUM_CAP}) or search node cap "
                             f"(default {DEFAULT_NODE_CAP})")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--verify", action="store_true",
                        help="cross-check formulas by brute-force enumeration")

    parser = argparse.ArgumentParser(prog="c2t", description="n^d Connect-Tac-Toe toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("lines", parents=[common], help="enumerate geometric lines")
    sub.add_parser("count-plays", parents=[common], help="count full plays")
    p = sub.add_parser("enumerate-tp", parents=[common], help="terminal positions")
    p.add_argument("--list", action="store_true", help="include every coloring")
    p = sub.add_parser("construct", parents=[common], help="gravity play for a layered coloring")
    p.add_argument("--coloring", help="layer coloring as 'n,d-1:XO..'")
    p.add_argument("--assignment", help="layer kinds as a B/F string, bottom layer first")
    p = sub.add_parser("greedy", parents=[common], help="greedy Base/Flipped layer assignment")
    p.add_argument("--coloring", help="proper halving layer coloring as 'n,d-1:XO..'")
    p = sub.add_parser("hj-search", parents=[common], help="exhaustive proper-coloring search")
    p.add_argument("--variant", choices=[v.value for v in Variant])
    p = sub.add_parser("solve", parents=[common], help="exact game value")
    p.add_argument("--position", help="position as 'n,d:X.O..' in cell-index order")
    p = sub.add_parser("verify", parents=[common], help="run every reproduction check")
    p.add_argument("--inject-fault", choices=["multinomial"], help=argparse.SUPPRESS)
    p = sub.add_parser("play", parents=[common], help="play against the engine")
    p.add_argument("--human", choices=["X", "O"], default="X")
    p.add_argument("--depth", type=int, default=None,
                   help="depth-capped engine when the exact search hits the node cap")
    return parser


def main(argv=None, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (PreconditionError, IllegalMoveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except C2TError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
