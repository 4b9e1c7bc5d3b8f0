"""TD(lambda), TD-directed(lambda) and TDLeaf(lambda) end-of-game updates.

All three rules share one update::

    delta_w = alpha * sum_t grad_t * sum_{j >= t} lam**(j - t) * d_j

They differ only in which predictions and gradients are used. TD and
TD-directed use the static evaluation of the root positions x_t (TD-directed
merely chooses its moves by deeper search); TDLeaf uses the depth-d search
value of x_t and the gradient at the principal-variation leaf.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .evaluation import EvalResult, ParamVector
from .games.base import Action, Game, State
from .search import SearchResult

ALGORITHMS = ("td", "td-directed", "tdleaf")
SCHEDULES = ("constant", "1/games")
TRAJECTORY_FORMAT = "tdleaf-trajectory v1"


@dataclass(frozen=True)
class UpdateConfig:
    algorithm: str = "tdleaf"
    lam: float = 0.7
    alpha: float = 1.0
    schedule: str = "constant"
    depth: int = 2
    #: "learner": only positions with the Learner to move; "all": every position
    positions: str = "learner"
    clip_norm: float | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"λ ∈ [0,1] required, got {self.lam}")
        if not self.alpha >= 0.0:
            raise ValueError(f"learning rate must be >= 0, got {self.alpha}")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"alpha schedule must be one of {SCHEDULES}")
        if self.depth < 0:
            raise ValueError("search depth must be >= 0")
        if self.positions not in ("learner", "all"):
            raise ValueError("positions must be 'learner' or 'all'")

    def alpha_at(self, game_number: int) -> float:
        """Learning rate for the ``game_number``-th game (1-based)."""
        if self.schedule == "constant":
            return self.alpha
        return self.alpha / max(game_number, 1)


@dataclass
class TrajectoryRecord:
    move_index: int
    state: State
    root: EvalResult
    search: SearchResult | None = None
    action: Action | None = None


@dataclass
class GameTrajectory:
    """Decision points x_1..x_{N-1} of one game plus the terminal reward r(x_N)."""

    records: list[TrajectoryRecord] = field(default_factory=list)
    reward: float = 0.0
    game: str = ""

    @property
    def length(self) -> int:
        """N: the decision points plus the terminal position."""
        return len(self.records) + 1


@dataclass
class UpdateReport:
    delta: np.ndarray
    diffs: np.ndarray
    errors: np.ndarray


class TrajectoryError(ValueError):
    pass


def temporal_differences(values: Sequence[float], reward: float) -> np.ndarray:
    """d_t = J(x_{t+1}) - J(x_t), with the last difference taken against the reward."""
    if len(values) == 0:
        raise ValueError("temporal differences need at least one prediction")
    v = np.asarray(values, dtype=np.float64)
    nxt = np.append(v[1:], float(reward))
    return nxt - v


def lambda_sum(d: Sequence[float], lam: float) -> np.ndarray:
    """out[t] = sum_{j >= t} lam**(j - t) * d[j] via out[t] = d[t] + lam * out[t + 1]."""
    d = np.asarray(d, dtype=np.float64)
    out = np.empty_like(d)
    acc = 0.0
    for t in range(len(d) - 1, -1, -1):
        acc = d[t] + lam * acc
        out[t] = acc
    return out


def td_core(
    values: Sequence[float], grads: np.ndarray, reward: float, lam: float, alpha: float,
    clip_norm: float | None = None,
) -> UpdateReport:
    grads = np.asarray(grads, dtype=np.float64)
    if not np.all(np.isfinite(grads)):
        bad = sorted({int(t) for t in np.argwhere(~np.isfinite(grads))[:, 0]})
        raise FloatingPointError(f"non-finite gradient at decision points {bad}")
    diffs = temporal_differences(values, reward)
    errors = lambda_sum(diffs, lam)
    delta = alpha * (grads * errors[:, None]).sum(axis=0)
    if clip_norm is not None:
        norm = float(np.linalg.norm(delta))
        if norm > clip_norm:
            delta = delta * (clip_norm / norm)
    return UpdateReport(delta, diffs, errors)


def _check(traj: GameTrajectory, w: ParamVector | np.ndarray) -> int:
    if not traj.records:
        raise TrajectoryError("trajectory has no decision points")
    return len(w.w if isinstance(w, ParamVector) else w)


def td_update(
    traj: GameTrajectory, w: ParamVector | np.ndarray, cfg: UpdateConfig, alpha: float | None = None
) -> UpdateReport:
    """TD(lambda) / TD-directed(lambda): root evaluations and root gradients."""
    k = _check(traj, w)
    values = [r.root.value for r in traj.records]
    grads = np.array([r.root.gradient for r in traj.records]).reshape(len(values), k)
    return td_core(values, grads, traj.reward, cfg.lam, cfg.alpha if alpha is None else alpha, cfg.clip_norm)


def tdleaf_update(
    traj: GameTrajectory, w: ParamVector | np.ndarray, cfg: UpdateConfig, alpha: float | None = None
) -> UpdateReport:
    """TDLeaf(lambda): search values of the roots and gradients at their PV leaves."""
    k = _check(traj, w)
    missing = [r.move_index for r in traj.records if r.search is None]
    if missing:
        raise TrajectoryError(f"no search result stored for moves {missing}")
    values = [r.search.value for r in traj.records]
    grads = np.array([r.search.leaf_gradient for r in traj.records]).reshape(len(values), k)
    return td_core(values, grads, traj.reward, cfg.lam, cfg.alpha if alpha is None else alpha, cfg.clip_norm)


def update(
    traj: GameTrajectory, w: ParamVector | np.ndarray, cfg: UpdateConfig, alpha: float | None = None
) -> UpdateReport:
    if cfg.algorithm == "tdleaf":
        return tdleaf_update(traj, w, cfg, alpha)
    return td_update(traj, w, cfg, alpha)


# --- trajectory dump ----------------------------------------------------------


def _floats(xs) -> str:
    return " ".join(f"{x:.17g}" for x in xs)


def dump_trajectory(traj: GameTrajectory, game: Game) -> str:
    lines = [
        f"# {TRAJECTORY_FORMAT}",
        f"game {game.name}",
        f"reward {traj.reward:.17g}",
        f"records {len(traj.records)}",
    ]
    for r in traj.records:
        lines.append(f"record {r.move_index}")
        lines.append(f"  state {game.serialize(r.state)}")
        lines.append(f"  root_value {r.root.value:.17g}")
        lines.append(f"  root_gradient {_floats(r.root.gradient)}")
        if r.search is not None:
            s = r.search
            lines.append(f"  depth {s.depth}")
            lines.append(f"  value {s.value:.17g}")
            lines.append(f"  pv {' '.join(game.action_name(a) for a in s.pv)}".rstrip())
            lines.append(f"  leaf {game.serialize(s.leaf)}")
            lines.append(f"  gradient {_floats(s.leaf_gradient)}")
    return "\n".join(lines) + "\n"


def load_trajectory(text: str, game: Game) -> GameTrajectory:
    """Inverse of :func:`dump_trajectory`; PVs come back as action names."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != f"# {TRAJECTORY_FORMAT}":
        raise ValueError(f"not a trajectory dump (expected '# {TRAJECTORY_FORMAT}')")
    traj = GameTrajectory(game=game.name)
    cur: dict[str, str] | None = None
    blocks: list[tuple[int, dict[str, str]]] = []
    for ln in lines[1:]:
        if not ln.strip():
            continue
        key, _, rest = ln.strip().partition(" ")
        if ln.startswith("  ") and cur is not None:
            cur[key] = rest
        elif key == "record":
            cur = {}
            blocks.append((int(rest), cur))
        elif key == "reward":
            traj.reward = float(rest)
    for idx, b in blocks:
        root = EvalResult(float(b["root_value"]), np.array([float(x) for x in b["root_gradient"].split()]))
        search = None
        if "value" in b:
            leaf = game.parse(b["leaf"])
            pv = b.get("pv", "").split()
            search = SearchResult(
                float(b["value"]), pv, [None] * len(pv), leaf,
                np.array([float(x) for x in b["gradient"].split()]), 0, int(b["depth"]), [(1.0, leaf)],
            )
        traj.records.append(TrajectoryRecord(idx, game.parse(b["state"]), root, search))
    return traj
