"""Parameterized evaluation functions with analytic gradients.

The evaluator is linear in the game's features, optionally passed through
``tanh(beta * x)`` so predictions live in the reward range. Terminal states
evaluate to their reward with a zero gradient, independent of the weights.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .games.base import Game, State

#: tanh(DEFAULT_BETA * 1 pawn) == 0.25: one pawn of material is a quarter of a win.
DEFAULT_BETA = math.atanh(0.25)

WEIGHT_FORMAT = "tdleaf-weights v1"


class DimensionError(ValueError):
    pass


class NonFiniteWeightsError(FloatingPointError):
    pass


@dataclass(frozen=True)
class SquashConfig:
    enabled: bool = False
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"squash beta must be positive, got {self.beta}")


@dataclass
class ParamVector:
    """Evaluation weights ``w`` plus the number of updates applied so far."""

    w: np.ndarray
    names: tuple[str, ...]
    updates: int = 0

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64).copy()
        self.names = tuple(self.names)
        if self.w.ndim != 1 or len(self.w) != len(self.names):
            raise DimensionError(f"{len(self.names)} feature names but weights of shape {self.w.shape}")
        if not np.all(np.isfinite(self.w)):
            raise NonFiniteWeightsError(f"non-finite weights: {self.w}")

    @property
    def k(self) -> int:
        return len(self.w)

    @classmethod
    def zeros(cls, game: Game) -> "ParamVector":
        return cls(np.zeros(game.k), game.feature_names)

    def updated(self, delta: np.ndarray) -> "ParamVector":
        """New vector ``w + delta`` with the update count bumped; rejects NaN/Inf."""
        return ParamVector(self.w + delta, self.names, self.updates + 1)

    def digest(self) -> str:
        return hashlib.sha256(self.w.tobytes()).hexdigest()

    def copy(self) -> "ParamVector":
        return ParamVector(self.w, self.names, self.updates)


@dataclass(frozen=True)
class EvalResult:
    value: float
    gradient: np.ndarray = field(repr=False)


def _dot(feats, wt) -> float:
    s = 0.0
    for f, x in zip(feats, wt):
        s += f * x
    return s


class Evaluator:
    """``J(x, w) = squash(w . features(x))`` for one game and squash setting."""

    def __init__(self, game: Game, squash: SquashConfig | None = None):
        self.game = game
        self.squash = squash or SquashConfig()

    def _check(self, w: ParamVector | np.ndarray) -> tuple[float, ...]:
        arr = w.w if isinstance(w, ParamVector) else np.asarray(w, dtype=np.float64)
        if len(arr) != self.game.k:
            raise DimensionError(f"weights have length {len(arr)} but {self.game.name} has {self.game.k} features")
        return tuple(arr.tolist())

    def value_fn(self, w: ParamVector | np.ndarray):
        """A fast scalar ``state -> J(state, w)`` for use inside search.

        Returns exactly the value :meth:`evaluate` would.
        """
        wt = self._check(w)
        features = self.game.features
        if self.squash.enabled:
            beta = self.squash.beta

            def value(state: State) -> float:
                if state.result is not None:
                    return float(state.result)
                return math.tanh(beta * _dot(features(state), wt))
        else:
            def value(state: State) -> float:
                if state.result is not None:
                    return float(state.result)
                return _dot(features(state), wt)
        return value

    def evaluate(self, state: State, w: ParamVector | np.ndarray) -> EvalResult:
        wt = self._check(w)
        if state.result is not None:
            return EvalResult(float(state.result), np.zeros(len(wt)))
        f = self.game.features(state)
        feats = np.array(f, dtype=np.float64)
        raw = _dot(f, wt)
        if self.squash.enabled:
            beta = self.squash.beta
            v = math.tanh(beta * raw)
            return EvalResult(v, feats * (beta * (1.0 - v * v)))
        return EvalResult(raw, feats)


def grad_check(
    evaluator: Evaluator, state: State, w: ParamVector | np.ndarray, step: float = 1e-6
) -> float:
    """Max relative error between the analytic gradient and central differences.

    The relative error of each component uses the denominator
    ``max(|analytic|, |numeric|, 1e-8)``.
    """
    if not step > 0:
        raise ValueError("finite-difference step must be positive")
    base = np.asarray(w.w if isinstance(w, ParamVector) else w, dtype=np.float64)
    analytic = evaluator.evaluate(state, base).gradient
    worst = 0.0
    for i in range(len(base)):
        up = base.copy()
        down = base.copy()
        up[i] += step
        down[i] -= step
        numeric = (evaluator.evaluate(state, up).value - evaluator.evaluate(state, down).value) / (2 * step)
        denom = max(abs(analytic[i]), abs(numeric), 1e-8)
        worst = max(worst, abs(analytic[i] - numeric) / denom)
    return worst


def material_init(game: Game, mode: str = "material") -> ParamVector:
    """Weights initialised from conventional piece values.

    ``mode="material"`` sets each material feature to its computer value
    (pawn 1, knight 4, bishop 4, rook 6, queen 12) and every other feature to
    0. ``mode="pawn"`` sets every coefficient to the value of a pawn. Values
    are in pawn units; with the default squash a one-pawn lead evaluates to
    tanh(beta) = 0.25.
    """
    if not game.material_values:
        raise ValueError(f"{game.name} has no material features")
    if mode == "material":
        w = [game.material_values.get(n, 0.0) for n in game.feature_names]
    elif mode == "pawn":
        w = [game.material_values["pawn"]] * game.k
    else:
        raise ValueError(f"unknown material init mode {mode!r}")
    return ParamVector(np.array(w), game.feature_names)


def initial_weights(game: Game, init: str) -> ParamVector:
    if init == "zero":
        return ParamVector.zeros(game)
    return material_init(game, init)


# --- weight files -----------------------------------------------------------


def dump_weights(w: ParamVector, game_name: str, squash: SquashConfig) -> str:
    lines = [
        f"# {WEIGHT_FORMAT}",
        f"game {game_name}",
        f"k {w.k}",
        f"squash {'tanh' if squash.enabled else 'none'} {squash.beta:.17g}",
        f"updates {w.updates}",
    ]
    lines += [f"{name} {x:.17g}" for name, x in zip(w.names, w.w.tolist())]
    return "\n".join(lines) + "\n"


def loads_weights(text: str) -> tuple[ParamVector, str, SquashConfig]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != f"# {WEIGHT_FORMAT}":
        raise ValueError(f"not a weight file (expected header '# {WEIGHT_FORMAT}')")
    head: dict[str, list[str]] = {}
    for ln in lines[1:5]:
        key, *rest = ln.split()
        head[key] = rest
    try:
        game_name = head["game"][0]
        k = int(head["k"][0])
        kind, beta = head["squash"]
        updates = int(head["updates"][0])
    except (KeyError, IndexError, ValueError):
        raise ValueError("weight file header needs game, k, squash and updates lines") from None
    names, values = [], []
    for ln in lines[5:]:
        name, value = ln.split()
        names.append(name)
        values.append(float(value))
    if len(values) != k:
        raise DimensionError(f"weight file declares k={k} but lists {len(values)} weights")
    squash = SquashConfig(kind == "tanh", float(beta))
    return ParamVector(np.array(values), tuple(names), updates), game_name, squash


def save_weights(path: str | Path, w: ParamVector, game_name: str, squash: SquashConfig) -> None:
    Path(path).write_text(dump_weights(w, game_name, squash))


def load_weights(path: str | Path) -> tuple[ParamVector, str, SquashConfig]:
    return loads_weights(Path(path).read_text())
