"""Exact game values by full-depth (expecti)minimax with memoization.

Used as the ground-truth oracle: values are the expected terminal reward
under optimal play by both sides, from the Learner's perspective.
"""

from __future__ import annotations

import sys

from .games.base import Game, State


class StateSpaceCapExceeded(RuntimeError):
    pass


class Solver:
    """Memoized exact solver; keep one around to amortize the table across queries."""

    def __init__(self, game: Game, cap: int = 2_000_000):
        self.game = game
        self.cap = cap
        self.memo: dict[State, float] = {}

    def value(self, state: State) -> float:
        limit = sys.getrecursionlimit()
        if limit < 10_000:
            sys.setrecursionlimit(10_000)
        try:
            return self._value(state)
        finally:
            sys.setrecursionlimit(limit)

    def _value(self, state: State) -> float:
        v = self.memo.get(state)
        if v is not None:
            return v
        if state.result is not None:
            v = float(state.result)
        else:
            vals = [self._action_value(state, a) for a in self.game.legal_actions(state)]
            v = max(vals) if state.to_move == 1 else min(vals)
        if len(self.memo) >= self.cap:
            raise StateSpaceCapExceeded(f"state-space cap of {self.cap} states exceeded")
        self.memo[state] = v
        return v

    def _action_value(self, state: State, action) -> float:
        game = self.game
        outcomes = game.chance_events(state, action)
        if len(outcomes) == 1:
            return self._value(game.successor(state, action, outcomes[0][0]))
        return sum(p * self._value(game.successor(state, action, e)) for e, p in outcomes)

    def action_values(self, state: State) -> list[tuple[object, float]]:
        return [(a, self._action_value(state, a)) for a in self.game.legal_actions(state)]

    def optimal_actions(self, state: State) -> list:
        """All actions achieving the exact value, in canonical order."""
        v = self.value(state)
        return [a for a, q in self.action_values(state) if q == v]


def solve_exact(game: Game, state: State, cap: int = 2_000_000) -> float:
    return Solver(game, cap).value(state)
