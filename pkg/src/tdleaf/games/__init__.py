"""Reference games and the game registry."""

from .base import Game, GameRecord, IllegalActionError, RewardUndefinedError, Role
from .connect4 import Connect4
from .dicerace import DiceRace
from .minichess import MiniChess
from .tictactoe import TicTacToe
from .tree import TreeGame, figure1

GAMES = {
    "tictactoe": TicTacToe,
    "connect4": Connect4,
    "minichess": MiniChess,
    "dicerace": DiceRace,
}


def get_game(name: str) -> Game:
    """Build a game by registry name; ``dicerace-<track>-<faces>`` selects a dice-race variant."""
    if name.startswith("dicerace-"):
        _, track, faces = name.split("-")
        return DiceRace(int(track), int(faces))
    try:
        return GAMES[name]()
    except KeyError:
        raise ValueError(f"unknown game {name!r}; choose from {sorted(GAMES)}") from None


__all__ = [
    "Connect4",
    "DiceRace",
    "GAMES",
    "Game",
    "GameRecord",
    "IllegalActionError",
    "MiniChess",
    "RewardUndefinedError",
    "Role",
    "TicTacToe",
    "TreeGame",
    "figure1",
    "get_game",
]
