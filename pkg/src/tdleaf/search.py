"""Fixed-depth minimax, alpha-beta and expectiminimax with PV-leaf gradients.

Values are from the Learner's perspective: Learner nodes maximize, Opponent
nodes minimize. Terminal nodes are scored by their reward at any depth.
Children are searched in canonical order and an incumbent is only replaced
on strict improvement, so ties always resolve to the first best child and
alpha-beta returns the same PV as plain minimax.

For deterministic games the root value is the evaluation of the PV leaf and
its gradient is that leaf's gradient. At chance nodes the value is the
probability-weighted mean of the children and the gradient is the matching
probability-weighted sum of PV-leaf gradients over the principal subtree.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .evaluation import Evaluator, ParamVector
from .games.base import State

INF = math.inf

PRUNING = ("none", "alphabeta")
CHANCE = ("forbid", "expectiminimax")


class ChanceNodeError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    depth: int = 1
    pruning: str = "alphabeta"
    chance: str = "expectiminimax"

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError(f"search depth must be >= 0, got {self.depth}")
        if self.pruning not in PRUNING:
            raise ValueError(f"pruning must be one of {PRUNING}")
        if self.chance not in CHANCE:
            raise ValueError(f"chance handling must be one of {CHANCE}")


@dataclass
class SearchResult:
    value: float
    pv: list
    pv_events: list
    leaf: State
    leaf_gradient: np.ndarray = field(repr=False)
    nodes_visited: int
    depth: int
    #: (path probability, leaf) pairs of the principal subtree; one entry for deterministic games
    leaves: list = field(default_factory=list, repr=False)

    def replay(self, game, root: State) -> State:
        state = root
        for a, e in zip(self.pv, self.pv_events):
            state = game.successor(state, a, e)
        return state


@dataclass
class TraceLine:
    depth: int
    state_hash: str
    alpha: float
    beta: float
    value: float

    def __str__(self) -> str:
        return f"{self.depth} {self.state_hash} {self.alpha:g} {self.beta:g} {self.value:.17g}"


def state_hash(game, state: State) -> str:
    return hashlib.sha1(game.serialize(state).encode()).hexdigest()[:12]


def _deterministic_child(game, state, action):
    outcomes = game.chance_events(state, action)
    if len(outcomes) != 1:
        raise ChanceNodeError(
            f"chance node after {game.action_name(action)!r} in {game.serialize(state)!r}; "
            "use chance handling 'expectiminimax'"
        )
    return game.successor(state, action, outcomes[0][0])


def _finish(ev: Evaluator, w, value, pv, events, leaf, nodes, depth, leaves=None) -> SearchResult:
    if leaves is None:
        grad = ev.evaluate(leaf, w).gradient
        leaves = [(1.0, leaf)]
    else:
        grad = np.zeros(ev.game.k)
        for p, lf in leaves:
            if lf.result is None:
                grad = grad + p * ev.evaluate(lf, w).gradient
    return SearchResult(value, pv, events, leaf, grad, nodes, depth, leaves)


def minimax(
    ev: Evaluator,
    state: State,
    w: ParamVector | np.ndarray,
    cfg: SearchConfig,
    trace: list | None = None,
) -> SearchResult:
    """Plain depth-limited minimax without pruning."""
    game = ev.game
    value = ev.value_fn(w)
    nodes = 0

    def rec(s: State, depth: int):
        nonlocal nodes
        nodes += 1
        if s.result is not None:
            out = (float(s.result), [], s)
        elif depth == 0:
            out = (value(s), [], s)
        else:
            maximize = s.to_move == 1
            best = None
            for a in game.legal_actions(s):
                v, pv, leaf = rec(_deterministic_child(game, s, a), depth - 1)
                if best is None or (v > best[0] if maximize else v < best[0]):
                    best = (v, [a] + pv, leaf)
            out = best
        if trace is not None:
            trace.append(TraceLine(depth, state_hash(game, s), -INF, INF, out[0]))
        return out

    v, pv, leaf = rec(state, cfg.depth)
    return _finish(ev, w, v, pv, [None] * len(pv), leaf, nodes, cfg.depth)


def alphabeta(
    ev: Evaluator,
    state: State,
    w: ParamVector | np.ndarray,
    cfg: SearchConfig,
    trace: list | None = None,
) -> SearchResult:
    """Fail-soft alpha-beta; same value, PV and leaf as :func:`minimax`."""
    game = ev.game
    value = ev.value_fn(w)
    nodes = 0

    def rec(s: State, depth: int, alpha: float, beta: float):
        nonlocal nodes
        nodes += 1
        a0, b0 = alpha, beta
        if s.result is not None:
            out = (float(s.result), [], s)
        elif depth == 0:
            out = (value(s), [], s)
        elif s.to_move == 1:
            best = None
            for a in game.legal_actions(s):
                v, pv, leaf = rec(_deterministic_child(game, s, a), depth - 1, alpha, beta)
                if best is None or v > best[0]:
                    best = (v, pv, leaf, a)
                    if v > alpha:
                        alpha = v
                    if alpha >= beta:
                        break
            out = (best[0], [best[3]] + best[1], best[2])
        else:
            best = None
            for a in game.legal_actions(s):
                v, pv, leaf = rec(_deterministic_child(game, s, a), depth - 1, alpha, beta)
                if best is None or v < best[0]:
                    best = (v, pv, leaf, a)
                    if v < beta:
                        beta = v
                    if alpha >= beta:
                        break
            out = (best[0], [best[3]] + best[1], best[2])
        if trace is not None:
            trace.append(TraceLine(depth, state_hash(game, s), a0, b0, out[0]))
        return out

    v, pv, leaf = rec(state, cfg.depth, -INF, INF)
    return _finish(ev, w, v, pv, [None] * len(pv), leaf, nodes, cfg.depth)


def expectiminimax(
    ev: Evaluator,
    state: State,
    w: ParamVector | np.ndarray,
    cfg: SearchConfig,
) -> SearchResult:
    """Depth-limited expectiminimax; chance nodes average their children.

    Depth counts decision plies; the chance event that follows each action
    does not consume depth. The reported leaf follows the most probable event
    at every chance node (first in canonical order on ties).
    """
    game = ev.game
    value = ev.value_fn(w)
    nodes = 0

    def rec(s: State, depth: int):
        nonlocal nodes
        nodes += 1
        if s.result is not None:
            return float(s.result), [], [], s, [(1.0, s)]
        if depth == 0:
            return value(s), [], [], s, [(1.0, s)]
        maximize = s.to_move == 1
        best = None
        for a in game.legal_actions(s):
            outcomes = game.chance_events(s, a)
            if len(outcomes) == 1:
                e = outcomes[0][0]
                v, pv, evs, leaf, leaves = rec(game.successor(s, a, e), depth - 1)
                cand = (v, [a] + pv, [e] + evs, leaf, leaves)
            else:
                total = sum(p for _, p in outcomes)
                if abs(total - 1.0) > 1e-12:
                    raise ValueError(f"chance probabilities sum to {total!r}, not 1")
                v = 0.0
                leaves = []
                top = None
                for e, p in outcomes:
                    cv, cpv, cevs, cleaf, cleaves = rec(game.successor(s, a, e), depth - 1)
                    v += p * cv
                    leaves.extend((p * q, lf) for q, lf in cleaves)
                    if top is None or p > top[0]:
                        top = (p, e, cpv, cevs, cleaf)
                _, e, cpv, cevs, cleaf = top
                cand = (v, [a] + cpv, [e] + cevs, cleaf, leaves)
            if best is None or (cand[0] > best[0] if maximize else cand[0] < best[0]):
                best = cand
        return best

    v, pv, evs, leaf, leaves = rec(state, cfg.depth)
    return _finish(ev, w, v, pv, evs, leaf, nodes, cfg.depth, leaves)


def search(
    ev: Evaluator, state: State, w: ParamVector | np.ndarray, cfg: SearchConfig
) -> SearchResult:
    """Dispatch on the game and config: expectiminimax, alpha-beta or minimax."""
    if ev.game.stochastic and cfg.chance == "expectiminimax":
        return expectiminimax(ev, state, w, cfg)
    if cfg.pruning == "alphabeta":
        return alphabeta(ev, state, w, cfg)
    return minimax(ev, state, w, cfg)


def choose(
    ev: Evaluator,
    state: State,
    w: ParamVector | np.ndarray,
    cfg: SearchConfig,
    rng=None,
    epsilon: float = 0.0,
):
    """Search and pick the first PV action, exploring uniformly with probability ``epsilon``.

    Returns ``(action, search_result)``; the search result always describes
    the greedy line even when an exploratory action was taken.
    """
    if state.result is not None:
        raise ValueError(f"cannot select an action in terminal state {ev.game.serialize(state)!r}")
    if cfg.depth < 1:
        raise ValueError("action selection needs search depth >= 1")
    result = search(ev, state, w, cfg)
    action = result.pv[0]
    if epsilon > 0:
        if rng.random() < epsilon:
            actions = ev.game.legal_actions(state)
            action = actions[int(rng.integers(len(actions)))]
    return action, result


def select_action(
    ev: Evaluator,
    state: State,
    w: ParamVector | np.ndarray,
    cfg: SearchConfig,
    rng=None,
    epsilon: float = 0.0,
):
    return choose(ev, state, w, cfg, rng, epsilon)[0]

