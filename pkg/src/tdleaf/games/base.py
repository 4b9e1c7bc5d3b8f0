"""Abstract two-player game interface shared by search, learning and the harness.

States are immutable and hashable. Every state exposes two attributes the
rest of the package relies on:

* ``to_move`` -- a :class:`Role` value.
* ``result`` -- ``None`` while the game is running, otherwise the terminal
  reward from the Learner's point of view (+1 win, -1 loss, 0 draw).

Values, rewards and features are always expressed from the Learner's fixed
perspective; the Opponent minimizes them.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Hashable


class Role(IntEnum):
    LEARNER = 1
    OPPONENT = -1

    @property
    def other(self) -> "Role":
        return Role(-self.value)

    @property
    def symbol(self) -> str:
        return "L" if self is Role.LEARNER else "O"

    @classmethod
    def from_symbol(cls, s: str) -> "Role":
        if s == "L":
            return cls.LEARNER
        if s == "O":
            return cls.OPPONENT
        raise ValueError(f"unknown role symbol {s!r}")


State = Any
Action = Hashable
#: A chance event paired with its probability.
ChanceOutcome = tuple[Hashable, float]

DETERMINISTIC: tuple[ChanceOutcome, ...] = ((None, 1.0),)


class IllegalActionError(ValueError):
    pass


class RewardUndefinedError(ValueError):
    pass


class Game(ABC):
    """A finite two-player zero-sum game, optionally with chance moves.

    Chance is modelled as following an action: ``apply(state, action, event)``
    takes ``event`` from ``chance_events(state, action)``. Deterministic games
    return the single unit event ``None`` with probability 1.
    """

    name: str = ""
    feature_names: tuple[str, ...] = ()
    stochastic: bool = False
    #: feature name -> conventional material value, for games that have them
    material_values: dict[str, float] | None = None
    #: f(swap_roles(x)) == -f(x) holds for this game's feature set
    antisymmetric_features: bool = True

    @property
    def k(self) -> int:
        return len(self.feature_names)

    @abstractmethod
    def initial_state(self, first: Role = Role.LEARNER, rng=None) -> State:
        """Starting position. Stochastic games draw any opening chance event from ``rng``."""

    @abstractmethod
    def legal_actions(self, state: State) -> list[Action]:
        """Legal actions in canonical order; empty for terminal states."""

    @abstractmethod
    def successor(self, state: State, action: Action, event: Hashable = None) -> State:
        """Unchecked transition; callers guarantee legality (search uses this directly)."""

    @abstractmethod
    def features(self, state: State) -> tuple[float, ...]:
        ...

    @abstractmethod
    def serialize(self, state: State) -> str:
        ...

    @abstractmethod
    def parse(self, text: str) -> State:
        ...

    def swap_roles(self, state: State) -> State:
        """Same position with the Learner and Opponent exchanged (used by symmetry checks)."""
        raise NotImplementedError(f"{self.name} does not define a role swap")

    def chance_events(self, state: State, action: Action) -> tuple[ChanceOutcome, ...]:
        return DETERMINISTIC

    def apply(self, state: State, action: Action, event: Hashable = None) -> State:
        if state.result is not None or action not in self.legal_actions(state):
            raise IllegalActionError(
                f"illegal action {self.action_name(action)!r} in state {self.serialize(state)!r}"
            )
        if self.stochastic:
            if event not in {e for e, _ in self.chance_events(state, action)}:
                raise IllegalActionError(
                    f"chance event {event!r} impossible after {self.action_name(action)!r} "
                    f"in state {self.serialize(state)!r}"
                )
        return self.successor(state, action, event)

    def is_terminal(self, state: State) -> bool:
        return state.result is not None

    def terminal_reward(self, state: State) -> float:
        if state.result is None:
            raise RewardUndefinedError(
                f"reward undefined before termination: {self.serialize(state)!r}"
            )
        return float(state.result)

    def to_move(self, state: State) -> Role:
        return Role(state.to_move)

    def action_name(self, action: Action) -> str:
        return str(action)

    def parse_action(self, state: State, name: str) -> Action:
        for a in self.legal_actions(state):
            if self.action_name(a) == name:
                return a
        raise IllegalActionError(f"no legal action named {name!r} in {self.serialize(state)!r}")

    def event_name(self, event: Hashable) -> str:
        return "" if event is None else str(event)

    def parse_event(self, state: State, action: Action, name: str) -> Hashable:
        for e, _ in self.chance_events(state, action):
            if self.event_name(e) == name:
                return e
        raise ValueError(f"no chance event named {name!r}")

    def sample_event(self, state: State, action: Action, rng) -> Hashable:
        outcomes = self.chance_events(state, action)
        if len(outcomes) == 1:
            return outcomes[0][0]
        u = rng.random()
        acc = 0.0
        for e, p in outcomes:
            acc += p
            if u < acc:
                return e
        return outcomes[-1][0]


@dataclass
class GameRecord:
    """A played game: starting position plus the sequence of (action, event) names."""

    game: str
    seed: int | str
    players: tuple[str, str]
    start: str
    moves: list[tuple[str, str]] = field(default_factory=list)
    result: float | None = None

    def dumps(self) -> str:
        lines = [
            f"# game: {self.game}",
            f"# seed: {self.seed}",
            f"# players: {self.players[0]} vs {self.players[1]}",
            f"# start: {self.start}",
        ]
        for action, event in self.moves:
            lines.append(f"{action} {event}" if event else action)
        if self.result is not None:
            lines.append(f"# result: {self.result:g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "GameRecord":
        header: dict[str, str] = {}
        moves: list[tuple[str, str]] = []
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition(":")
                header[key.strip()] = value.strip()
            else:
                action, _, event = line.partition(" ")
                moves.append((action, event))
        a, _, b = header["players"].partition(" vs ")
        result = float(header["result"]) if "result" in header else None
        return cls(header["game"], header["seed"], (a, b), header["start"], moves, result)

    def replay(self, game: Game) -> list[State]:
        """Replay the moves from the recorded start; returns every visited state."""
        state = game.parse(self.start)
        states = [state]
        for action_name, event_name in self.moves:
            action = game.parse_action(state, action_name)
            event = game.parse_event(state, action, event_name) if game.stochastic else None
            state = game.apply(state, action, event)
            states.append(state)
        return states
