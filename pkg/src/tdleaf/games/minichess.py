"""Gardner 5x5 minichess scored by material only.

Simplified rules: no castling, no en passant, no double pawn step; pawns
promote to queens; moves are pseudo-legal and the game ends when a king is
captured. A game that reaches ``max_plies`` or leaves the mover without a
move is drawn.

Squares are indexed ``row * 5 + col``; the Learner starts on rows 0-1 and
moves up the board. Serialization lists rows bottom to top (Learner pieces
upper case, Opponent lower case, ``.`` empty) followed by ``|side|ply``::

    RNBQK/PPPPP/...../ppppp/rnbqk|L|0

Actions are (from, to) square pairs named like ``b2b3``.
"""

from __future__ import annotations

from typing import NamedTuple

from .base import Game, Role

SIZE = 5
PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6
LETTERS = {PAWN: "p", KNIGHT: "n", BISHOP: "b", ROOK: "r", QUEEN: "q", KING: "k"}
CODES = {v: k for k, v in LETTERS.items()}

INITIAL = (
    "RNBQK",
    "PPPPP",
    ".....",
    "ppppp",
    "rnbqk",
)


def _on_board(r: int, c: int) -> bool:
    return 0 <= r < SIZE and 0 <= c < SIZE


def _steps(deltas):
    table = []
    for sq in range(SIZE * SIZE):
        r, c = divmod(sq, SIZE)
        table.append(tuple((r + dr) * SIZE + c + dc for dr, dc in deltas if _on_board(r + dr, c + dc)))
    return tuple(table)


def _rays(deltas):
    table = []
    for sq in range(SIZE * SIZE):
        r, c = divmod(sq, SIZE)
        rays = []
        for dr, dc in deltas:
            ray = []
            rr, cc = r + dr, c + dc
            while _on_board(rr, cc):
                ray.append(rr * SIZE + cc)
                rr += dr
                cc += dc
            if ray:
                rays.append(tuple(ray))
        table.append(tuple(rays))
    return tuple(table)


ORTHO = ((1, 0), (0, 1), (-1, 0), (0, -1))
DIAG = ((1, 1), (1, -1), (-1, 1), (-1, -1))
KNIGHT_STEPS = _steps(((2, 1), (2, -1), (1, 2), (1, -2), (-1, 2), (-1, -2), (-2, 1), (-2, -1)))
KING_STEPS = _steps(ORTHO + DIAG)
ROOK_RAYS = _rays(ORTHO)
BISHOP_RAYS = _rays(DIAG)
QUEEN_RAYS = tuple(a + b for a, b in zip(ROOK_RAYS, BISHOP_RAYS))


class ChessState(NamedTuple):
    board: tuple[int, ...]
    to_move: int
    ply: int
    result: int | None


def square_name(sq: int) -> str:
    r, c = divmod(sq, SIZE)
    return "abcde"[c] + str(r + 1)


def parse_square(name: str) -> int:
    return (int(name[1]) - 1) * SIZE + "abcde".index(name[0])


def _moves(board: tuple[int, ...], side: int, first_only: bool = False) -> list[tuple[int, int]]:
    out = []
    for sq in range(SIZE * SIZE):
        p = board[sq] * side
        if p <= 0:
            continue
        if p == PAWN:
            r, c = divmod(sq, SIZE)
            nr = r + side
            if 0 <= nr < SIZE:
                ahead = nr * SIZE + c
                if board[ahead] == 0:
                    out.append((sq, ahead))
                for dc in (-1, 1):
                    if 0 <= c + dc < SIZE:
                        t = ahead + dc
                        if board[t] * side < 0:
                            out.append((sq, t))
        elif p == KNIGHT or p == KING:
            for t in (KNIGHT_STEPS if p == KNIGHT else KING_STEPS)[sq]:
                if board[t] * side <= 0:
                    out.append((sq, t))
        else:
            rays = ROOK_RAYS if p == ROOK else BISHOP_RAYS if p == BISHOP else QUEEN_RAYS
            for ray in rays[sq]:
                for t in ray:
                    v = board[t] * side
                    if v > 0:
                        break
                    out.append((sq, t))
                    if v < 0:
                        break
        if first_only and out:
            return out
    return out


class MiniChess(Game):
    name = "minichess"
    feature_names = ("pawn", "knight", "bishop", "rook", "queen")
    material_values = {"pawn": 1.0, "knight": 4.0, "bishop": 4.0, "rook": 6.0, "queen": 12.0}

    def __init__(self, max_plies: int = 80):
        self.max_plies = max_plies

    def initial_state(self, first: Role = Role.LEARNER, rng=None) -> ChessState:
        return self.parse("/".join(INITIAL) + f"|{first.symbol}|0")

    def legal_actions(self, state: ChessState) -> list[tuple[int, int]]:
        if state.result is not None:
            return []
        return _moves(state.board, state.to_move)

    def successor(self, state: ChessState, action: tuple[int, int], event=None) -> ChessState:
        src, dst = action
        board = list(state.board)
        piece = board[src]
        captured = board[dst]
        board[src] = 0
        last_row = SIZE - 1 if piece > 0 else 0
        if abs(piece) == PAWN and dst // SIZE == last_row:
            piece = QUEEN if piece > 0 else -QUEEN
        board[dst] = piece
        board = tuple(board)
        ply = state.ply + 1
        mover = state.to_move
        if abs(captured) == KING:
            result = mover
        elif ply >= self.max_plies or not _moves(board, -mover, first_only=True):
            result = 0
        else:
            result = None
        return ChessState(board, -mover, ply, result)

    def features(self, state: ChessState) -> tuple[float, ...]:
        counts = [0, 0, 0, 0, 0, 0, 0]
        for p in state.board:
            if p > 0:
                counts[p] += 1
            elif p < 0:
                counts[-p] -= 1
        return (
            float(counts[PAWN]),
            float(counts[KNIGHT]),
            float(counts[BISHOP]),
            float(counts[ROOK]),
            float(counts[QUEEN]),
        )

    def swap_roles(self, state: ChessState) -> ChessState:
        board = [0] * (SIZE * SIZE)
        for sq, p in enumerate(state.board):
            r, c = divmod(sq, SIZE)
            board[(SIZE - 1 - r) * SIZE + c] = -p
        result = None if state.result is None else -state.result
        return ChessState(tuple(board), -state.to_move, state.ply, result)

    def action_name(self, action: tuple[int, int]) -> str:
        return square_name(action[0]) + square_name(action[1])

    def serialize(self, state: ChessState) -> str:
        rows = []
        for r in range(SIZE):
            row = ""
            for c in range(SIZE):
                p = state.board[r * SIZE + c]
                ch = LETTERS[abs(p)] if p else "."
                row += ch.upper() if p > 0 else ch
            rows.append(row)
        return "/".join(rows) + f"|{Role(state.to_move).symbol}|{state.ply}"

    def parse(self, text: str) -> ChessState:
        try:
            rows, mover, ply = text.strip().split("|")
        except ValueError:
            raise ValueError(f"minichess state needs 'rows|side|ply': {text!r}") from None
        parts = rows.split("/")
        if len(parts) != SIZE or any(len(p) != SIZE for p in parts):
            raise ValueError(f"minichess state needs {SIZE} rows of {SIZE}: {text!r}")
        board = []
        for ch in "".join(parts):
            if ch == ".":
                board.append(0)
            else:
                code = CODES[ch.lower()]
                board.append(code if ch.isupper() else -code)
        board = tuple(board)
        side = int(Role.from_symbol(mover))
        ply = int(ply)
        kings = {p for p in board if abs(p) == KING}
        if len(kings) < 2:
            result = 1 if KING in kings else -1
        elif ply >= self.max_plies or not _moves(board, side, first_only=True):
            result = 0
        else:
            result = None
        return ChessState(board, side, ply, result)
