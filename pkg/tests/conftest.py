import numpy as np
import pytest

from tdleaf.games import get_game
from tdleaf.harness import sample_positions

DETERMINISTIC = ("tictactoe", "connect4", "minichess")
ALL_GAMES = DETERMINISTIC + ("dicerace",)


@pytest.fixture(params=ALL_GAMES)
def game(request):
    return get_game(request.param)


@pytest.fixture(params=DETERMINISTIC)
def det_game(request):
    return get_game(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_positions(game, n, seed=0):
    return sample_positions(game, n, seed)


#: one line per acceptance criterion, filled by test_acceptance and shown in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
