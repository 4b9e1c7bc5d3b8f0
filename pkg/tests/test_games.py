import itertools

import numpy as np
import pytest

from tdleaf.games import (
    Connect4,
    DiceRace,
    GameRecord,
    IllegalActionError,
    MiniChess,
    RewardUndefinedError,
    Role,
    TicTacToe,
    get_game,
)
from tdleaf.games.minichess import parse_square
from tdleaf.solve import Solver, StateSpaceCapExceeded, solve_exact

from conftest import random_positions


def playout(game, rng):
    state = game.initial_state(Role.LEARNER if rng.random() < 0.5 else Role.OPPONENT, rng)
    states = [state]
    while state.result is None:
        actions = game.legal_actions(state)
        a = actions[int(rng.integers(len(actions)))]
        state = game.apply(state, a, game.sample_event(state, a, rng))
        states.append(state)
    return states


class TestLegalActions:
    def test_tictactoe_empty_board(self):
        g = TicTacToe()
        assert g.legal_actions(g.initial_state()) == list(range(9))

    def test_tictactoe_one_empty_cell(self):
        g = TicTacToe()
        s = g.parse("LOLLOO.LO|L")
        assert s.result is None
        assert g.legal_actions(s) == [6]

    def test_connect4_full_column(self):
        g = Connect4()
        found = 0
        for s in random_positions(g, 3000, seed=3):
            full = [c for c in range(5) if all(s.board[r * 5 + c] for r in range(4))]
            if len(full) != 1:
                continue
            brute = [c for c in range(5) if s.board[3 * 5 + c] == 0]
            assert len(brute) == 4
            assert g.legal_actions(s) == brute
            found += 1
        assert found > 20

    def test_terminal_state_has_no_actions(self, game, rng):
        for _ in range(20):
            final = playout(game, rng)[-1]
            assert game.legal_actions(final) == []

    def test_canonical_order_is_stable(self, game):
        for s in random_positions(game, 200, seed=1):
            assert game.legal_actions(s) == game.legal_actions(s)


class TestApply:
    def test_tictactoe_center(self):
        g = TicTacToe()
        s = g.apply(g.initial_state(), 4)
        assert g.serialize(s) == "....L....|O"
        assert s.to_move == Role.OPPONENT

    def test_dicerace_advance(self):
        g = DiceRace()
        s = g.parse("L=0,3 O=5,12 roll=2 to=L")
        t = g.apply(s, 1, 3)
        assert t.learner == (0, 5)
        assert t.to_move == Role.OPPONENT
        assert t.roll == 3

    def test_dicerace_knock_back(self):
        g = DiceRace()
        s = g.parse("L=0,3 O=5,9 roll=2 to=L")
        t = g.apply(s, 1, 1)
        assert t.learner == (0, 5) and t.opponent == (4, 9)

    def test_minichess_capture_removes_material(self):
        g = MiniChess()
        s = g.parse("RNBQK/PPPPP/.p.../p.ppp/rnbqk|L|1")
        before = g.features(s)
        t = g.apply(s, (parse_square("c2"), parse_square("b3")))
        text = g.serialize(t).split("|")[0]
        # independent recount from the serialized board
        recount = tuple(float(text.count(ch.upper()) - text.count(ch)) for ch in "pnbrq")
        assert g.features(t) == recount
        assert g.features(t)[0] == before[0] + 1

    def test_illegal_action_names_action_and_state(self):
        g = TicTacToe()
        s = g.apply(g.initial_state(), 4)
        with pytest.raises(IllegalActionError, match=r"'4'.*L\.\.\.\."):
            g.apply(s, 4)

    def test_determinism(self, game, rng):
        for s in random_positions(game, 200, seed=2):
            for a in game.legal_actions(s):
                for e, _ in game.chance_events(s, a):
                    assert game.apply(s, a, e) == game.apply(s, a, e)


class TestTerminalReward:
    def test_learner_line(self):
        g = TicTacToe()
        assert g.terminal_reward(g.parse("LLLOO....|O")) == 1.0

    def test_full_board_draw(self):
        g = TicTacToe()
        assert g.terminal_reward(g.parse("LOLLOOOLL|O")) == 0.0

    def test_dicerace_opponent_home(self):
        g = DiceRace()
        assert g.terminal_reward(g.parse("L=4,9 O=12,12 roll=1 to=L")) == -1.0

    def test_undefined_before_termination(self, game):
        with pytest.raises(RewardUndefinedError, match="reward undefined before termination"):
            game.terminal_reward(game.initial_state())


def _ttt_scan(board, to_move):
    """Brute-force line scan over all 8 winning lines from coordinates."""
    lines = [[(r, c) for c in range(3)] for r in range(3)]
    lines += [[(r, c) for r in range(3)] for c in range(3)]
    lines += [[(i, i) for i in range(3)], [(i, 2 - i) for i in range(3)]]
    open2 = {1: 0, -1: 0}
    open1 = {1: 0, -1: 0}
    for ln in lines:
        vals = [board[r * 3 + c] for r, c in ln]
        for side in (1, -1):
            if -side not in vals:
                n = vals.count(side)
                if n == 2:
                    open2[side] += 1
                elif n == 1:
                    open1[side] += 1
    mover, waiting = open2[to_move], open2[-to_move]
    threat = to_move if mover else 0
    fork = -to_move if waiting >= 2 and mover == 0 else 0
    corners = sum(board[i] for i in (0, 2, 6, 8))
    return (open2[1] - open2[-1], open1[1] - open1[-1], board[4], corners, threat, fork)


class TestFeatures:
    def test_minichess_initial_is_balanced(self):
        g = MiniChess()
        assert g.features(g.initial_state()) == (0.0,) * 5

    def test_minichess_knight_up(self):
        g = MiniChess()
        s = g.parse("RNBQK/PPPPP/...../ppppp/r.bqk|O|6")
        text = g.serialize(s).split("|")[0]
        assert g.features(s)[1] == text.count("N") - text.count("n") == 1

    def test_tictactoe_matches_line_scan(self):
        g = TicTacToe()
        count = 0
        for cells in itertools.product((0, 1, -1), repeat=9):
            s = g.parse("".join(".LO"[c] for c in cells) + "|L")
            if s.result is not None:
                continue
            for mover in (1, -1):
                st = s._replace(to_move=mover)
                assert g.features(st) == tuple(float(x) for x in _ttt_scan(cells, mover))
                count += 1
        assert count > 5000

    def test_length_constant(self, game):
        for s in random_positions(game, 300, seed=4):
            assert len(game.features(s)) == game.k

    def test_antisymmetric_under_role_swap(self, game):
        assert game.antisymmetric_features
        for s in random_positions(game, 500, seed=5):
            f = np.array(game.features(s))
            g = np.array(game.features(game.swap_roles(s)))
            np.testing.assert_array_equal(g, -f)


class TestSerialization:
    def test_roundtrip_random_playouts(self, game):
        rng = np.random.default_rng(99)
        n_states = 0
        for _ in range(10_000):
            for s in playout(game, rng):
                assert game.parse(game.serialize(s)) == s
                actions = game.legal_actions(s)
                assert (s.result is None) == bool(actions)
                n_states += 1
        assert n_states > 10_000

    def test_game_record_replays(self, game, rng):
        for _ in range(20):
            states = playout(game, rng)
            rec = GameRecord(game.name, 7, ("a", "b"), game.serialize(states[0]))
            for s, t in zip(states, states[1:]):
                for a in game.legal_actions(s):
                    for e, _ in game.chance_events(s, a):
                        if game.successor(s, a, e) == t:
                            move = (game.action_name(a), game.event_name(e) if game.stochastic else "")
                            break
                    else:
                        continue
                    break
                rec.moves.append(move)
            rec.result = states[-1].result
            again = GameRecord.loads(rec.dumps())
            assert again == GameRecord(game.name, "7", ("a", "b"), rec.start, rec.moves, float(rec.result))
            assert again.replay(game)[-1] == states[-1]


class TestChance:
    def test_probabilities_sum_to_one(self):
        for faces in (1, 2, 3):
            g = DiceRace(faces=faces)
            for s in random_positions(g, 100, seed=faces):
                for a in g.legal_actions(s):
                    assert abs(sum(p for _, p in g.chance_events(s, a)) - 1.0) <= 1e-12

    def test_deterministic_games_have_unit_event(self, det_game):
        s = det_game.initial_state()
        for a in det_game.legal_actions(s):
            assert det_game.chance_events(s, a) == ((None, 1.0),)


class TestSolveExact:
    def test_tictactoe_is_a_draw(self):
        g = TicTacToe()
        assert solve_exact(g, g.initial_state()) == 0.0
        assert solve_exact(g, g.initial_state(Role.OPPONENT)) == 0.0

    def test_immediate_win(self):
        g = TicTacToe()
        assert solve_exact(g, g.parse("LL.OO....|L")) == 1.0

    def test_dicerace_two_outcome_mean(self):
        g = DiceRace(faces=2)
        solver = Solver(g)
        for s in random_positions(g, 50, seed=8):
            best = []
            for a in g.legal_actions(s):
                kids = [solver.value(g.apply(s, a, e)) for e, _ in g.chance_events(s, a)]
                best.append((kids[0] + kids[1]) / 2)
            want = max(best) if s.to_move == 1 else min(best)
            assert abs(solver.value(s) - want) <= 1e-12

    def test_cap_exceeded(self):
        g = Connect4()
        with pytest.raises(StateSpaceCapExceeded, match="cap of 1000"):
            solve_exact(g, g.initial_state(), cap=1000)

    def test_bellman_exhaustive_tictactoe(self):
        g = TicTacToe()
        solver = Solver(g)
        for first in Role:
            solver.value(g.initial_state(first))
        assert len(solver.memo) > 5000
        for s, v in solver.memo.items():
            if s.result is not None:
                assert v == s.result
                continue
            kids = [solver.memo[g.apply(s, a)] for a in g.legal_actions(s)]
            assert v == (max(kids) if s.to_move == 1 else min(kids))


class TestOptimalPlayMartingale:
    def test_tictactoe_optimal_lines_constant(self):
        g = TicTacToe()
        solver = Solver(g)
        lines = 0
        for first in Role:
            root = g.initial_state(first)
            v0 = solver.value(root)
            stack = [root]
            while stack:
                s = stack.pop()
                assert solver.value(s) == v0
                if s.result is not None:
                    lines += 1
                    continue
                stack.extend(g.apply(s, a) for a in solver.optimal_actions(s))
        assert lines > 100

    def test_dicerace_chance_mean(self):
        g = DiceRace()
        solver = Solver(g)
        for s in random_positions(g, 300, seed=11):
            for a in solver.optimal_actions(s):
                mean = sum(p * solver.value(g.apply(s, a, e)) for e, p in g.chance_events(s, a))
                assert abs(mean - solver.value(s)) <= 1e-12


def test_registry_rejects_unknown():
    with pytest.raises(ValueError, match="unknown game"):
        get_game("go")
