"""n^d Connect-Tac-Toe: Tic-Tac-Toe on the [n]^d hypercube under gravity.

Modules: ``board`` (cells, columns, lines), ``game`` (positions and the
availability rule), ``counting`` (play and terminal-position counts),
``coloring`` (proper colorings, layered constructions, Hales-Jewett variant
searches) and ``solver`` (exact game values).
"""
from .board import BoardDims, GeometricLine, enumerate_lines, line_count_formula
from .game import Mode, Player, Position

__all__ = ["BoardDims", "GeometricLine", "Mode", "Player", "Position", "enumerate_lines",
           "line_count_formula"]
