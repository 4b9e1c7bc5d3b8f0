"""Dice race: a two-token race game with chance, a miniature stand-in for backgammon.

Each side owns two tokens starting on cell 0 of a ``track``-cell course
(home is cell ``track``). The side to move already knows its roll and picks
which token to advance by that many cells (overshooting home is allowed).
A token that lands, with a roll of 2 or more, on a cell holding exactly one
enemy token knocks that token back one cell. Every move strictly increases
the total distance covered, so games always terminate. After the move, the
die is rolled for the other side: that roll is the chance event.

Serialization: ``L=a,b O=c,d roll=r to=S`` with token positions sorted.
Actions are ``0`` (rear token) and ``1`` (front token), named ``lo``/``hi``.
"""

from __future__ import annotations

from typing import NamedTuple

from .base import Game, Role


class DiceState(NamedTuple):
    learner: tuple[int, int]
    opponent: tuple[int, int]
    roll: int
    to_move: int
    result: int | None


class DiceRace(Game):
    feature_names = ("pip_lead", "home", "tempo", "roll", "blot_edge")
    stochastic = True

    def __init__(self, track: int = 12, faces: int = 3):
        if track < 2 or faces < 1:
            raise ValueError("dice race needs track >= 2 and faces >= 1")
        self.track = track
        self.faces = faces
        self.name = "dicerace" if (track, faces) == (12, 3) else f"dicerace-{track}-{faces}"
        self._events = tuple((f, 1.0 / faces) for f in range(1, faces + 1))

    def initial_state(self, first: Role = Role.LEARNER, rng=None) -> DiceState:
        roll = 1 if rng is None else int(rng.integers(1, self.faces + 1))
        return DiceState((0, 0), (0, 0), roll, int(first), None)

    def legal_actions(self, state: DiceState) -> list[int]:
        if state.result is not None:
            return []
        lo, hi = state.learner if state.to_move == 1 else state.opponent
        if lo == hi or hi == self.track:
            return [0]
        return [0, 1]

    def chance_events(self, state: DiceState, action: int):
        return self._events

    def successor(self, state: DiceState, action: int, event=None) -> DiceState:
        mine, theirs = (state.learner, state.opponent) if state.to_move == 1 else (state.opponent, state.learner)
        mine = list(mine)
        theirs = list(theirs)
        roll = state.roll
        dest = min(mine[action] + roll, self.track)
        mine[action] = dest
        if roll >= 2 and dest < self.track and theirs.count(dest) == 1:
            theirs[theirs.index(dest)] = dest - 1
        mine = tuple(sorted(mine))
        theirs = tuple(sorted(theirs))
        result = state.to_move if mine[0] == self.track else None
        next_roll = 1 if event is None else event
        if state.to_move == 1:
            return DiceState(mine, theirs, next_roll, -1, result)
        return DiceState(theirs, mine, next_roll, 1, result)

    def _exposed(self, tokens, enemies) -> int:
        n = 0
        for i, pos in enumerate(tokens):
            if not 0 < pos < self.track or tokens[1 - i] == pos:
                continue
            if any(2 <= pos - e <= self.faces for e in enemies):
                n += 1
        return n

    def features(self, state: DiceState) -> tuple[float, ...]:
        t = self.track
        lead = (sum(state.learner) - sum(state.opponent)) / t
        home = state.learner.count(t) - state.opponent.count(t)
        s = state.to_move
        edge = self._exposed(state.opponent, state.learner) - self._exposed(state.learner, state.opponent)
        return (float(lead), float(home), float(s), float(s * state.roll), float(edge))

    def swap_roles(self, state: DiceState) -> DiceState:
        result = None if state.result is None else -state.result
        return DiceState(state.opponent, state.learner, state.roll, -state.to_move, result)

    def action_name(self, action: int) -> str:
        return ("lo", "hi")[action]

    def serialize(self, state: DiceState) -> str:
        me, o = state.learner, state.opponent
        return f"L={me[0]},{me[1]} O={o[0]},{o[1]} roll={state.roll} to={Role(state.to_move).symbol}"

    def parse(self, text: str) -> DiceState:
        try:
            fields = dict(part.split("=") for part in text.split())
            learner = tuple(sorted(int(x) for x in fields["L"].split(",")))
            opponent = tuple(sorted(int(x) for x in fields["O"].split(",")))
            roll = int(fields["roll"])
            side = int(Role.from_symbol(fields["to"]))
        except (KeyError, ValueError):
            raise ValueError(f"malformed dice-race state: {text!r}") from None
        for p in learner + opponent:
            if not 0 <= p <= self.track:
                raise ValueError(f"token off the track: {text!r}")
        if not 1 <= roll <= self.faces:
            raise ValueError(f"roll {roll} outside 1..{self.faces}: {text!r}")
        result = 1 if learner[0] == self.track else -1 if opponent[0] == self.track else None
        return DiceState(learner, opponent, roll, side, result)
