"""Property suites behind ``tdleaf verify``.

Each suite returns a list of :class:`Check` results; a suite passes when
every check does. Position counts are parameters so the suites can be run
quickly or at full size.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .evaluation import EvalResult, Evaluator, SquashConfig, grad_check
from .games import figure1, get_game
from .games.base import Role
from .harness import sample_positions
from .search import SearchConfig, alphabeta, expectiminimax, minimax, search
from .td import GameTrajectory, TrajectoryRecord, UpdateConfig, lambda_sum, td_update, tdleaf_update

log = logging.getLogger(__name__)

SUITES = ("gradcheck", "search-oracle", "td-oracle", "figure1")
DETERMINISTIC = ("tictactoe", "connect4", "minichess")
#: largest oracle depth per game; unpruned minichess search beyond 4 plies takes minutes per position
ORACLE_DEPTH = {"tictactoe": 6, "connect4": 6, "minichess": 4}
GRAD_TOL_TANH = 1e-6
GRAD_TOL_LINEAR = 1e-8


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}" + (f"  ({self.detail})" if self.detail else "")


def figure1_suite() -> list[Check]:
    game, w = figure1()
    ev = Evaluator(game)
    root = game.initial_state()
    m = minimax(ev, root, w, SearchConfig(3, "none"))
    a = alphabeta(ev, root, w, SearchConfig(3))
    leaf_grad = ev.evaluate(m.leaf, w).gradient
    return [
        Check("root value is 4", m.value == 4.0, f"got {m.value:g}"),
        Check("PV is A-C-F-L", m.pv == ["C", "F", "L"], "A-" + "-".join(m.pv)),
        Check("root gradient equals leaf gradient", bool(np.array_equal(m.leaf_gradient, leaf_grad))),
        Check("alpha-beta agrees", (a.value, a.pv, a.leaf) == (m.value, m.pv, m.leaf)),
    ]


def gradcheck_suite(positions: int = 1000, seed: int = 0) -> list[Check]:
    checks = []
    for name in DETERMINISTIC + ("dicerace",):
        game = get_game(name)
        rng = np.random.default_rng(seed)
        states = sample_positions(game, positions, seed)
        for squash, tol in ((SquashConfig(True), GRAD_TOL_TANH), (SquashConfig(False), GRAD_TOL_LINEAR)):
            ev = Evaluator(game, squash)
            worst = max((grad_check(ev, s, rng.uniform(-1, 1, game.k)) for s in states), default=0.0)
            label = "tanh" if squash.enabled else "linear"
            checks.append(Check(f"{name} {label} gradient", worst <= tol, f"max rel err {worst:.2e} <= {tol:g}"))
    return checks


def _expectimax(game, ev, w, state, depth):
    if state.result is not None:
        return float(state.result)
    if depth == 0:
        return ev.evaluate(state, w).value
    vals = [
        sum(p * _expectimax(game, ev, w, game.apply(state, a, e), depth - 1) for e, p in game.chance_events(state, a))
        for a in game.legal_actions(state)
    ]
    return max(vals) if state.to_move == Role.LEARNER else min(vals)


def search_oracle_suite(positions: int = 1000, seed: int = 0, max_depth: dict | None = None) -> list[Check]:
    if positions <= 0:
        log.warning("search-oracle run on 0 positions: nothing checked")
        return [Check("search oracle (0 positions)", True, "vacuous")]
    depths = dict(ORACLE_DEPTH, **(max_depth or {}))
    checks = []
    for name in DETERMINISTIC:
        game = get_game(name)
        ev = Evaluator(game, SquashConfig(True))
        rng = np.random.default_rng(seed)
        bad = 0
        for i, s in enumerate(sample_positions(game, positions, seed)):
            w = rng.uniform(-1, 1, game.k)
            cfg = SearchConfig(i % depths[name] + 1)
            a = alphabeta(ev, s, w, cfg)
            m = minimax(ev, s, w, SearchConfig(cfg.depth, "none"))
            bad += (a.value, a.pv, a.leaf) != (m.value, m.pv, m.leaf)
        checks.append(Check(f"{name} alpha-beta = minimax, depths 1-{depths[name]}", bad == 0, f"{bad} mismatches"))
    game = get_game("dicerace")
    ev = Evaluator(game, SquashConfig(True))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in sample_positions(game, max(positions // 2, 1), seed):
        w = rng.uniform(-1, 1, game.k)
        worst = max(worst, abs(expectiminimax(ev, s, w, SearchConfig(2)).value - _expectimax(game, ev, w, s, 2)))
    checks.append(Check("dicerace expectiminimax = brute force, d=2", worst <= 1e-12, f"max err {worst:.1e}"))
    return checks


def td_oracle_suite(positions: int = 200, seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(max(positions, 1)):
        d = rng.normal(size=int(rng.integers(1, 30)))
        lam = float(rng.random())
        direct = [sum(lam ** (j - t) * d[j] for j in range(t, len(d))) for t in range(len(d))]
        worst = max(worst, float(np.max(np.abs(lambda_sum(d, lam) - direct))))
    checks = [Check("lambda_sum = direct double sum", worst <= 1e-12, f"max err {worst:.1e}")]

    values = [0.5, -0.25, 0.375, 0.0625]
    grads = np.array([[1.0, 0.5], [-2.0, 0.25], [0.0, 1.0], [4.0, -1.0]])
    records = [TrajectoryRecord(t, None, EvalResult(v, g)) for t, (v, g) in enumerate(zip(values, grads))]
    traj = GameTrajectory(records, 1.0)
    nxt = values[1:] + [1.0]
    eq5 = (grads * np.array([n - v for n, v in zip(nxt, values)])[:, None]).sum(axis=0)
    eq6 = (grads * np.array([1.0 - v for v in values])[:, None]).sum(axis=0)
    w = np.zeros(2)
    lam0 = td_update(traj, w, UpdateConfig("td", 0.0, 1.0)).delta
    lam1 = td_update(traj, w, UpdateConfig("td", 1.0, 1.0)).delta
    checks.append(Check("λ=0 closed form", lam0.tolist() == eq5.tolist()))
    checks.append(Check("λ=1 closed form", lam1.tolist() == eq6.tolist()))

    game = get_game("tictactoe")
    ev = Evaluator(game, SquashConfig(True))
    identical = True
    for s0 in sample_positions(game, 20, seed)[::5]:
        w = rng.uniform(-1, 1, game.k)
        recs = []
        s = s0
        while s.result is None:
            recs.append(TrajectoryRecord(len(recs), s, ev.evaluate(s, w), search(ev, s, w, SearchConfig(0))))
            acts = game.legal_actions(s)
            s = game.apply(s, acts[int(rng.integers(len(acts)))])
        traj = GameTrajectory(recs, float(s.result))
        a = tdleaf_update(traj, w, UpdateConfig("tdleaf", 0.7, 1.0, depth=0)).delta
        b = td_update(traj, w, UpdateConfig("td", 0.7, 1.0)).delta
        identical &= a.tobytes() == b.tobytes()
    checks.append(Check("TDLeaf d=0 bit-identical to TD", identical))
    return checks


def run_suite(name: str, positions: int | None = None, seed: int = 0) -> list[Check]:
    if name == "figure1":
        return figure1_suite()
    if name == "gradcheck":
        return gradcheck_suite(1000 if positions is None else positions, seed)
    if name == "search-oracle":
        return search_oracle_suite(1000 if positions is None else positions, seed)
    if name == "td-oracle":
        return td_oracle_suite(200 if positions is None else positions, seed)
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES}")
