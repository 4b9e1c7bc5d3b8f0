"""Reduced Connect-4: 5 columns, 4 rows, four in a row wins.

Cells are indexed ``row * 5 + col`` with row 0 at the bottom. Serialization
lists rows bottom to top separated by ``/`` then ``|`` and the side to move,
e.g. ``L..../...../...../.....|O``. Actions are column numbers 0-4.
"""

from __future__ import annotations

from typing import NamedTuple

from .base import Game, Role

COLS = 5
ROWS = 4
CENTER_COL = 2


def _windows() -> tuple[tuple[int, ...], ...]:
    out = []
    for r in range(ROWS):
        for c in range(COLS - 3):
            out.append(tuple(r * COLS + c + i for i in range(4)))
    for c in range(COLS):
        for r in range(ROWS - 3):
            out.append(tuple((r + i) * COLS + c for i in range(4)))
    for c in range(COLS - 3):
        out.append(tuple(i * COLS + c + i for i in range(4)))
        out.append(tuple(i * COLS + c + 3 - i for i in range(4)))
    return tuple(out)


WINDOWS = _windows()


class C4State(NamedTuple):
    board: tuple[int, ...]
    to_move: int
    result: int | None


def _outcome(board: tuple[int, ...]) -> int | None:
    for w in WINDOWS:
        s = board[w[0]]
        if s and s == board[w[1]] == board[w[2]] == board[w[3]]:
            return s
    if 0 not in board:
        return 0
    return None


def _height(board: tuple[int, ...], col: int) -> int:
    h = 0
    while h < ROWS and board[h * COLS + col]:
        h += 1
    return h


class Connect4(Game):
    name = "connect4"
    feature_names = ("open_three", "open_two", "open_one", "center", "mover_threat")

    def initial_state(self, first: Role = Role.LEARNER, rng=None) -> C4State:
        return C4State((0,) * (ROWS * COLS), int(first), None)

    def legal_actions(self, state: C4State) -> list[int]:
        if state.result is not None:
            return []
        top = (ROWS - 1) * COLS
        return [c for c in range(COLS) if state.board[top + c] == 0]

    def successor(self, state: C4State, action: int, event=None) -> C4State:
        board = list(state.board)
        board[_height(state.board, action) * COLS + action] = state.to_move
        board = tuple(board)
        return C4State(board, -state.to_move, _outcome(board))

    def features(self, state: C4State) -> tuple[float, ...]:
        b = state.board
        counts = {1: [0, 0, 0, 0], -1: [0, 0, 0, 0]}
        playable_wins = {1: 0, -1: 0}
        for w in WINDOWS:
            mine = theirs = 0
            gap = -1
            for i in w:
                if b[i] == 1:
                    mine += 1
                elif b[i] == -1:
                    theirs += 1
                else:
                    gap = i
            if mine and theirs:
                continue
            side, n = (1, mine) if mine else (-1, theirs)
            if n == 0:
                continue
            counts[side][n] += 1
            if n == 3 and _height(b, gap % COLS) == gap // COLS:
                playable_wins[side] += 1
        threat = 0.0
        if state.result is None and playable_wins[state.to_move]:
            threat = float(state.to_move)
        center = sum(b[r * COLS + CENTER_COL] for r in range(ROWS))
        return (
            float(counts[1][3] - counts[-1][3]),
            float(counts[1][2] - counts[-1][2]),
            float(counts[1][1] - counts[-1][1]),
            float(center),
            threat,
        )

    def swap_roles(self, state: C4State) -> C4State:
        result = None if state.result is None else -state.result
        return C4State(tuple(-c for c in state.board), -state.to_move, result)

    def serialize(self, state: C4State) -> str:
        sym = {1: "L", -1: "O", 0: "."}
        rows = ["".join(sym[state.board[r * COLS + c]] for c in range(COLS)) for r in range(ROWS)]
        return "/".join(rows) + "|" + Role(state.to_move).symbol

    def parse(self, text: str) -> C4State:
        rows, _, mover = text.strip().partition("|")
        parts = rows.split("/")
        if len(parts) != ROWS or any(len(p) != COLS for p in parts):
            raise ValueError(f"connect4 state needs {ROWS} rows of {COLS}: {text!r}")
        board = tuple({"L": 1, "O": -1, ".": 0}[ch] for p in parts for ch in p)
        for c in range(COLS):
            h = _height(board, c)
            if any(board[r * COLS + c] for r in range(h, ROWS)):
                raise ValueError(f"floating disc in column {c}: {text!r}")
        return C4State(board, int(Role.from_symbol(mover)), _outcome(board))
