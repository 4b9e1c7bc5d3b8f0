"""Tic-tac-toe on a 3x3 board.

Serialization: nine cell characters in row-major order (``L`` learner mark,
``O`` opponent mark, ``.`` empty), a ``|`` and the side to move, e.g.
``L...O....|L``. Actions are cell indices 0-8, named by their decimal digit.
"""

from __future__ import annotations

from typing import NamedTuple

from .base import Game, Role

LINES = (
    (0, 1, 2), (3, 4, 5), (6, 7, 8),
    (0, 3, 6), (1, 4, 7), (2, 5, 8),
    (0, 4, 8), (2, 4, 6),
)
CORNERS = (0, 2, 6, 8)
CENTER = 4


class TTTState(NamedTuple):
    board: tuple[int, ...]
    to_move: int
    result: int | None


def _outcome(board: tuple[int, ...]) -> int | None:
    for a, b, c in LINES:
        s = board[a]
        if s and s == board[b] == board[c]:
            return s
    if 0 not in board:
        return 0
    return None


class TicTacToe(Game):
    name = "tictactoe"
    feature_names = ("open_two", "open_one", "center", "corners", "mover_threat", "fork")

    def initial_state(self, first: Role = Role.LEARNER, rng=None) -> TTTState:
        return TTTState((0,) * 9, int(first), None)

    def legal_actions(self, state: TTTState) -> list[int]:
        if state.result is not None:
            return []
        return [i for i, c in enumerate(state.board) if c == 0]

    def successor(self, state: TTTState, action: int, event=None) -> TTTState:
        board = list(state.board)
        board[action] = state.to_move
        board = tuple(board)
        return TTTState(board, -state.to_move, _outcome(board))

    def features(self, state: TTTState) -> tuple[float, ...]:
        """Line-threat features, antisymmetric under swapping the two roles.

        ``open_two``/``open_one`` count lines holding two/one marks of a side
        and none of the other (learner minus opponent). ``mover_threat`` is
        +1/-1 when the side to move (learner/opponent) can complete a line
        now; ``fork`` is +1/-1 when the side not to move owns two or more open
        twos while the mover has none.
        """
        b = state.board
        two = [0, 0]
        one = [0, 0]
        for ln in LINES:
            mine = theirs = 0
            for i in ln:
                c = b[i]
                if c == 1:
                    mine += 1
                elif c == -1:
                    theirs += 1
            if theirs == 0:
                if mine == 2:
                    two[0] += 1
                elif mine == 1:
                    one[0] += 1
            elif mine == 0:
                if theirs == 2:
                    two[1] += 1
                elif theirs == 1:
                    one[1] += 1
        if state.result is not None:
            threat = fork = 0.0
        else:
            s = state.to_move
            mover, waiting = (two[0], two[1]) if s == 1 else (two[1], two[0])
            threat = float(s) if mover > 0 else 0.0
            fork = float(-s) if (waiting >= 2 and mover == 0) else 0.0
        return (
            float(two[0] - two[1]),
            float(one[0] - one[1]),
            float(b[CENTER]),
            float(sum(b[i] for i in CORNERS)),
            threat,
            fork,
        )

    def swap_roles(self, state: TTTState) -> TTTState:
        result = None if state.result is None else -state.result
        return TTTState(tuple(-c for c in state.board), -state.to_move, result)

    def serialize(self, state: TTTState) -> str:
        cells = "".join({1: "L", -1: "O", 0: "."}[c] for c in state.board)
        return f"{cells}|{Role(state.to_move).symbol}"

    def parse(self, text: str) -> TTTState:
        cells, _, mover = text.strip().partition("|")
        if len(cells) != 9:
            raise ValueError(f"tic-tac-toe state needs 9 cells: {text!r}")
        board = tuple({"L": 1, "O": -1, ".": 0}[c] for c in cells)
        return TTTState(board, int(Role.from_symbol(mover)), _outcome(board))
