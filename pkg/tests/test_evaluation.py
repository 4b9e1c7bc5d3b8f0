import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tdleaf.evaluation import (
    DEFAULT_BETA,
    DimensionError,
    Evaluator,
    NonFiniteWeightsError,
    ParamVector,
    SquashConfig,
    dump_weights,
    grad_check,
    loads_weights,
    material_init,
)
from tdleaf.games import MiniChess, TicTacToe, TreeGame, get_game

from conftest import ALL_GAMES, random_positions


def central_difference(ev, state, w, step=1e-6):
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    for i in range(len(w)):
        up, down = w.copy(), w.copy()
        up[i] += step
        down[i] -= step
        out[i] = (ev.evaluate(state, up).value - ev.evaluate(state, down).value) / (2 * step)
    return out


class TestEvaluate:
    def test_zero_weights_linear(self, game):
        ev = Evaluator(game)
        for s in random_positions(game, 50):
            r = ev.evaluate(s, np.zeros(game.k))
            assert r.value == 0.0
            np.testing.assert_array_equal(r.gradient, game.features(s))

    def test_terminal_is_reward_with_zero_gradient(self):
        g = TicTacToe()
        s = g.parse("LLLOO....|O")
        for sq in (SquashConfig(False), SquashConfig(True, 3.0)):
            r = Evaluator(g, sq).evaluate(s, np.random.default_rng(0).normal(size=g.k))
            assert r.value == 1.0
            assert not r.gradient.any()

    def test_tanh_value_and_gradient(self):
        game = TreeGame({"A": ["B"]}, "A", features={"A": (0.25, 1.0)}, feature_names=("a", "b"))
        s = game.initial_state()
        w = np.array([1.0, 0.25])  # w . f = 0.5
        ev = Evaluator(game, SquashConfig(True, 1.0))
        r = ev.evaluate(s, w)
        assert r.value == math.tanh(0.5)
        expected = (1 - math.tanh(0.5) ** 2) * np.array([0.25, 1.0])
        np.testing.assert_allclose(r.gradient, expected, rtol=1e-15)
        np.testing.assert_allclose(r.gradient, central_difference(ev, s, w), rtol=1e-8)

    def test_dimension_mismatch(self):
        g = TicTacToe()
        with pytest.raises(DimensionError):
            Evaluator(g).evaluate(g.initial_state(), np.zeros(3))

    def test_value_fn_matches_evaluate_exactly(self, game):
        rng = np.random.default_rng(1)
        for sq in (SquashConfig(False), SquashConfig(True)):
            ev = Evaluator(game, sq)
            w = rng.uniform(-1, 1, game.k)
            f = ev.value_fn(w)
            for s in random_positions(game, 100, seed=2):
                assert f(s) == ev.evaluate(s, w).value


class TestProperties:
    def test_squash_bound(self, game):
        rng = np.random.default_rng(3)
        ev = Evaluator(game, SquashConfig(True))
        for s in random_positions(game, 300, seed=3):
            v = ev.evaluate(s, rng.uniform(-5, 5, game.k)).value
            if s.result is None:
                assert abs(v) < 1

    def test_zero_gradient_at_terminals(self, game):
        rng = np.random.default_rng(4)
        ev = Evaluator(game, SquashConfig(True))
        for s in random_positions(game, 2000, seed=4):
            for a in game.legal_actions(s):
                for e, _ in game.chance_events(s, a):
                    t = game.successor(s, a, e)
                    if t.result is not None:
                        assert not ev.evaluate(t, rng.normal(size=game.k)).gradient.any()

    @settings(max_examples=200, deadline=None)
    @given(
        a=st.floats(-10, 10),
        b=st.floats(-10, 10),
        seed=st.integers(0, 2**32 - 1),
        name=st.sampled_from(ALL_GAMES),
    )
    def test_linearity_without_squash(self, a, b, seed, name):
        game = get_game(name)
        rng = np.random.default_rng(seed)
        ev = Evaluator(game)
        w1, w2 = rng.normal(size=game.k), rng.normal(size=game.k)
        s = random_positions(game, 1, seed=seed % 1000)[0]
        lhs = ev.evaluate(s, a * w1 + b * w2).value
        rhs = a * ev.evaluate(s, w1).value + b * ev.evaluate(s, w2).value
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


class TestGradCheck:
    def test_linear_is_exact_to_rounding(self, game):
        # central differences at step 1e-6 carry ~eps/h = 1.1e-10 rounding per unit |v|/|f_i|
        rng = np.random.default_rng(5)
        ev = Evaluator(game)
        for s in random_positions(game, 500, seed=5):
            assert grad_check(ev, s, rng.uniform(-1, 1, game.k)) <= 1e-8

    def test_linear_exact_arithmetic_gives_zero(self, det_game):
        # integer features, dyadic weights and step: every operation is exact
        rng = np.random.default_rng(7)
        ev = Evaluator(det_game)
        for s in random_positions(det_game, 200, seed=7):
            w = rng.integers(-8, 9, det_game.k) / 8.0
            assert grad_check(ev, s, w, 2.0**-20) == 0.0

    def test_tanh_thousand_pairs(self, game):
        rng = np.random.default_rng(6)
        ev = Evaluator(game, SquashConfig(True))
        worst = max(
            grad_check(ev, s, rng.uniform(-1, 1, game.k), 1e-6)
            for s in random_positions(game, 1000, seed=6)
        )
        assert worst <= 1e-6

    def test_zero_features(self):
        game = TreeGame({"A": ["B"]}, "A", features={"A": (0.0, 0.0)}, feature_names=("a", "b"))
        ev = Evaluator(game, SquashConfig(True))
        assert grad_check(ev, game.initial_state(), np.array([0.3, -0.2])) == 0.0

    def test_rejects_bad_step(self):
        g = TicTacToe()
        with pytest.raises(ValueError):
            grad_check(Evaluator(g), g.initial_state(), np.zeros(g.k), 0.0)


class TestMaterialInit:
    def test_computer_values(self):
        w = material_init(MiniChess())
        assert dict(zip(w.names, w.w)) == {"pawn": 1, "knight": 4, "bishop": 4, "rook": 6, "queen": 12}

    def test_pawn_equal(self):
        assert material_init(MiniChess(), "pawn").w.tolist() == [1.0] * 5

    def test_non_material_features_zero(self):
        g = MiniChess()
        g.feature_names = g.feature_names + ("mobility",)
        w = material_init(g)
        assert w.w[-1] == 0.0

    def test_game_without_material(self):
        with pytest.raises(ValueError, match="no material"):
            material_init(TicTacToe())

    def test_default_beta_pawn_quarter(self):
        assert math.isclose(math.tanh(DEFAULT_BETA * 1.0), 0.25, rel_tol=1e-15)


class TestParamVector:
    def test_rejects_nan_update(self):
        w = ParamVector(np.zeros(2), ("a", "b"))
        with pytest.raises(NonFiniteWeightsError):
            w.updated(np.array([np.nan, 0.0]))

    def test_update_counts(self):
        w = ParamVector(np.zeros(2), ("a", "b")).updated(np.ones(2))
        assert w.updates == 1 and w.w.tolist() == [1.0, 1.0]

    @settings(max_examples=200)
    @given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=8))
    def test_weight_file_roundtrip_bit_exact(self, values):
        names = tuple(f"f{i}" for i in range(len(values)))
        w = ParamVector(np.array(values), names, updates=3)
        sq = SquashConfig(True, 0.3)
        w2, game, sq2 = loads_weights(dump_weights(w, "tictactoe", sq))
        assert w2.w.tobytes() == w.w.tobytes()
        assert (w2.names, w2.updates, game, sq2) == (names, 3, "tictactoe", sq)

    def test_weight_file_rejects_wrong_k(self):
        text = dump_weights(ParamVector(np.ones(2), ("a", "b")), "x", SquashConfig())
        with pytest.raises(DimensionError):
            loads_weights(text.replace("k 2", "k 3"))
