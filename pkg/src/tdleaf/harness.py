"""Playing games, training learners, fixed-weight matches and disagreement probes.

RNG streams: every game gets its own generator derived from the master seed
by ``numpy.random.SeedSequence(seed, spawn_key=(game_index, stream))``;
stream 0 drives agent choices, stream 1 drives chance events. Mirrored
matches share the chance stream of a game pair, so both sides see the same
dice with colours swapped.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .evaluation import Evaluator, ParamVector, SquashConfig, material_init
from .games.base import Game, GameRecord, IllegalActionError, Role
from .rating import INITIAL_RATING, RatingTrack, fit_ratings, rating_update
from .search import SearchConfig, choose, search
from .solve import Solver
from .td import GameTrajectory, TrajectoryRecord, UpdateConfig, update

log = logging.getLogger(__name__)

POLICIES = ("search", "random", "optimal")
STREAM_AGENT = 0
STREAM_CHANCE = 1


def game_rng(seed: int, index: int, stream: int = STREAM_AGENT) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, stream)))


@dataclass
class AgentSpec:
    name: str
    weights: ParamVector | None = None
    search: SearchConfig = field(default_factory=SearchConfig)
    epsilon: float = 0.0
    learning: bool = False
    policy: str = "search"
    squash: SquashConfig = field(default_factory=SquashConfig)

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.policy == "search" and self.weights is None:
            raise ValueError(f"search agent {self.name!r} needs weights")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")


_SOLVERS: dict[str, Solver] = {}


def _solver(game: Game) -> Solver:
    s = _SOLVERS.get(game.name)
    if s is None or s.game is not game:
        s = _SOLVERS[game.name] = Solver(game)
    return s


def act(agent: AgentSpec, game: Game, state, rng):
    """The agent's move in ``state`` and, for search agents, the search behind it."""
    if agent.policy == "random":
        actions = game.legal_actions(state)
        return actions[int(rng.integers(len(actions)))], None
    if agent.policy == "optimal":
        if agent.epsilon > 0 and rng.random() < agent.epsilon:
            actions = game.legal_actions(state)
            return actions[int(rng.integers(len(actions)))], None
        return _solver(game).optimal_actions(state)[0], None
    ev = Evaluator(game, agent.squash)
    return choose(ev, state, agent.weights, agent.search, rng, agent.epsilon)


@dataclass
class PlayedGame:
    outcome: float
    record: GameRecord
    trajectories: dict[Role, GameTrajectory] = field(default_factory=dict)

    @property
    def points_a(self) -> float:
        return (self.outcome + 1.0) / 2.0


def play_game(
    agent_a: AgentSpec,
    agent_b: AgentSpec,
    game: Game,
    rng: np.random.Generator,
    first: Role = Role.LEARNER,
    chance_rng: np.random.Generator | None = None,
    learn: UpdateConfig | None = None,
    seed: int | str = "",
) -> PlayedGame:
    """Play one game with ``agent_a`` in the Learner role and ``agent_b`` as Opponent.

    Learning agents get a trajectory of their decision points (every
    position when ``learn.positions == "all"``); when both roles are played
    by the same agent object only the Learner role is recorded unless all
    positions are requested. ``outcome`` is the terminal reward for agent A.
    """
    chance_rng = rng if chance_rng is None else chance_rng
    learn = learn or UpdateConfig()
    state = game.initial_state(first, chance_rng if game.stochastic else None)
    record = GameRecord(game.name, seed, (agent_a.name, agent_b.name), game.serialize(state))
    agents = {Role.LEARNER: agent_a, Role.OPPONENT: agent_b}
    self_play = agent_a is agent_b
    learners: dict[Role, AgentSpec] = {}
    if agent_a.learning:
        learners[Role.LEARNER] = agent_a
    if agent_b.learning and not self_play:
        learners[Role.OPPONENT] = agent_b
    trajs = {role: GameTrajectory(game=game.name) for role in learners}
    move = 0
    while state.result is None:
        mover = Role(state.to_move)
        agent = agents[mover]
        action, result = act(agent, game, state, rng)
        for role, learner in learners.items():
            if role != mover and learn.positions != "all":
                continue
            ev = Evaluator(game, learner.squash)
            root = ev.evaluate(state, learner.weights)
            sr = None
            if learn.algorithm == "tdleaf":
                if learner is agent and result is not None and result.depth == learn.depth:
                    sr = result
                else:
                    sr = search(ev, state, learner.weights, replace(learner.search, depth=learn.depth))
            trajs[role].records.append(TrajectoryRecord(move, state, root, sr, action))
        if action not in game.legal_actions(state):
            raise IllegalActionError(f"agent {agent.name!r} chose illegal {action!r}")
        event = game.sample_event(state, action, chance_rng)
        record.moves.append((game.action_name(action), game.event_name(event) if game.stochastic else ""))
        state = game.successor(state, action, event)
        move += 1
    outcome = game.terminal_reward(state)
    record.result = outcome
    for t in trajs.values():
        t.reward = outcome
    return PlayedGame(outcome, record, trajs)


# --- matches -----------------------------------------------------------------


@dataclass
class MatchRecord:
    agent_a: str
    agent_b: str
    game: str
    seed: int
    games: int = 0
    wins_a: int = 0
    draws: int = 0
    wins_b: int = 0
    points_a: float = 0.0
    points_b: float = 0.0
    records: list[GameRecord] = field(default_factory=list)

    def add(self, played: PlayedGame) -> None:
        self.games += 1
        if played.outcome > 0:
            self.wins_a += 1
        elif played.outcome < 0:
            self.wins_b += 1
        else:
            self.draws += 1
        self.points_a += played.points_a
        self.points_b += 1.0 - played.points_a
        self.records.append(played.record)

    @property
    def points_per_game_delta(self) -> float:
        return (self.points_a - self.points_b) / self.games if self.games else 0.0

    def dumps(self) -> str:
        head = [
            "# tdleaf-match v1",
            f"game {self.game}",
            f"seed {self.seed}",
            f"players {self.agent_a} vs {self.agent_b}",
            f"games {self.games}",
            f"wins_a {self.wins_a}",
            f"draws {self.draws}",
            f"wins_b {self.wins_b}",
            f"points_a {self.points_a:g}",
            f"points_b {self.points_b:g}",
        ]
        body = []
        for i, rec in enumerate(self.records):
            body.append(f"=== game {i}")
            body.append(rec.dumps().rstrip("\n"))
        return "\n".join(head + body) + "\n"


def _match_game(args):
    agent_a, agent_b, game, seed, i, mirrored = args
    first = Role.LEARNER if i % 2 == 0 else Role.OPPONENT
    rng = game_rng(seed, i, STREAM_AGENT)
    chance = game_rng(seed, i // 2 if mirrored else i, STREAM_CHANCE)
    return play_game(agent_a, agent_b, game, rng, first, chance, seed=f"{seed}/{i}")


def run_match(
    agent_a: AgentSpec,
    agent_b: AgentSpec,
    game: Game,
    games: int,
    seed: int,
    workers: int = 1,
    mirrored: bool | None = None,
) -> MatchRecord:
    """Fixed-weight match alternating the first mover every game.

    Stochastic games are mirrored by default: games 2i and 2i+1 share one
    chance stream with the first mover swapped.
    """
    if agent_a.learning or agent_b.learning:
        raise ValueError("matches are played with learning switched off")
    mirrored = game.stochastic if mirrored is None else mirrored
    jobs = [(agent_a, agent_b, game, seed, i, mirrored) for i in range(games)]
    rec = MatchRecord(agent_a.name, agent_b.name, game.name, seed)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_match_game, jobs, chunksize=max(1, games // (4 * workers))))
    else:
        results = map(_match_game, jobs)
    for played in results:
        rec.add(played)
    return rec


# --- opponent pools ------------------------------------------------------------


def reference_weights(game: Game) -> ParamVector:
    """Hand-set weights used by the graded pool (material values where the game has them)."""
    if game.material_values:
        return material_init(game)
    hand = {
        "tictactoe": [0.3, 0.05, 0.1, 0.05, 0.6, 0.4],
        "connect4": [0.3, 0.1, 0.02, 0.05, 0.5],
        "dicerace": [1.0, 0.3, 0.1, 0.05, 0.1],
    }
    base = hand.get(game.name.split("-")[0])
    if base is None:
        raise ValueError(f"no reference weights for {game.name}")
    return ParamVector(np.array(base), game.feature_names)


def default_pool(game: Game, noise: float = 0.1) -> list[AgentSpec]:
    """Graded fixed opponents: random, depth-1 and depth-3 reference searchers,
    and an exact player with an error rate for games small enough to solve."""
    w = reference_weights(game)
    sq = SquashConfig(True)
    pool = [
        AgentSpec("random", policy="random", epsilon=1.0),
        AgentSpec("d1-ref", w, SearchConfig(1), noise, squash=sq),
        AgentSpec("d3-ref", w, SearchConfig(3), noise, squash=sq),
    ]
    if game.name in ("tictactoe",) or game.name.startswith("dicerace"):
        pool.append(AgentSpec("optimal", policy="optimal", epsilon=2 * noise))
    return pool


#: Pool ratings frozen from ``calibrate_pool(game, default_pool(game), 200, seed=2024)``.
POOL_RATINGS: dict[str, dict[str, float]] = {
    "tictactoe": {"random": 1192.9, "d1-ref": 1632.0, "d3-ref": 1617.5, "optimal": 1557.6},
    "connect4": {"random": 1151.3, "d1-ref": 1619.0, "d3-ref": 1729.8},
    "minichess": {"random": 940.8, "d1-ref": 1591.6, "d3-ref": 1967.7},
    "dicerace": {"random": 1466.7, "d1-ref": 1490.4, "d3-ref": 1509.6, "optimal": 1533.3},
}


def calibrate_pool(
    game: Game, pool: list[AgentSpec], games_per_pair: int, seed: int
) -> tuple[dict[str, float], dict[tuple[str, str], float]]:
    """Round robin among pool members; returns fitted ratings and measured mean scores."""
    scores: dict[tuple[str, str], tuple[float, int]] = {}
    measured: dict[tuple[str, str], float] = {}
    pair = 0
    for i, a in enumerate(pool):
        for b in pool[i + 1:]:
            m = run_match(a, b, game, games_per_pair, seed + 7919 * pair)
            scores[(a.name, b.name)] = (m.points_a, m.games)
            measured[(a.name, b.name)] = m.points_a / m.games
            pair += 1
    return fit_ratings([p.name for p in pool], scores), measured


def pool_ratings(game: Game, pool: list[AgentSpec]) -> dict[str, float]:
    frozen = POOL_RATINGS.get(game.name, {})
    if all(p.name in frozen for p in pool):
        return {p.name: frozen[p.name] for p in pool}
    ratings, _ = calibrate_pool(game, pool, 100, seed=2024)
    return ratings


# --- training ------------------------------------------------------------------


@dataclass
class TrainResult:
    weights: ParamVector
    track: RatingTrack
    curve: list[tuple[int, float, float, float, str]]
    snapshots: dict[str, ParamVector]
    games_played: int
    halted: str | None = None


def train(
    game: Game,
    regime: str,
    games: int,
    cfg: UpdateConfig,
    seed: int,
    init: ParamVector | None = None,
    squash: SquashConfig | None = None,
    pool: list[AgentSpec] | None = None,
    ratings: dict[str, float] | None = None,
    epsilon: float | None = None,
    snapshot_every: int = 0,
    divergence_bound: float = 1e6,
) -> TrainResult:
    """Train a learner by self-play or against a fixed opponent pool.

    The configured TD rule is applied once after every game. Pool opponents
    are taken round-robin. The learner always holds the Learner role and
    moves first in even-numbered games.
    """
    if games < 1:
        raise ValueError("training needs games >= 1")
    if regime not in ("self-play", "pool"):
        raise ValueError(f"regime must be 'self-play' or 'pool', got {regime!r}")
    squash = squash or SquashConfig(True)
    w = (init or ParamVector.zeros(game)).copy()
    if epsilon is None:
        epsilon = 0.0 if game.stochastic else 0.05
    play_depth = max(cfg.depth, 1) if cfg.algorithm != "td" else 1
    if regime == "pool":
        pool = pool if pool is not None else default_pool(game)
        if any(p.learning for p in pool):
            raise ValueError("pool members must have learning switched off")
        ratings = ratings if ratings is not None else pool_ratings(game, pool)
    track = RatingTrack()
    curve: list[tuple[int, float, float, float, str]] = []
    snapshots: dict[str, ParamVector] = {}
    halted = None
    played_games = 0
    for g in range(games):
        learner = AgentSpec("learner", w, SearchConfig(play_depth), epsilon, True, squash=squash)
        if regime == "pool":
            opp = pool[g % len(pool)]
            opp_rating = ratings[opp.name]
        else:
            opp = learner
            opp_rating = track.rating
        first = Role.LEARNER if g % 2 == 0 else Role.OPPONENT
        played = play_game(
            learner, opp, game, game_rng(seed, g, STREAM_AGENT), first,
            game_rng(seed, g, STREAM_CHANCE), learn=cfg, seed=f"{seed}/{g}",
        )
        traj = played.trajectories.get(Role.LEARNER)
        if traj is not None and traj.records:
            report = update(traj, w, cfg, cfg.alpha_at(g + 1))
            w = w.updated(report.delta)
        played_games += 1
        # a game against oneself carries no rating information: scored as a draw
        rating_update(track, played.points_a if regime == "pool" else 0.5, opp_rating)
        snap = ""
        if snapshot_every and (g + 1) % snapshot_every == 0:
            snap = f"g{g + 1:06d}"
            snapshots[snap] = w.copy()
        curve.append((g + 1, track.rating, track.sigma, played.points_a, snap))
        worst = float(np.max(np.abs(w.w)))
        if worst > divergence_bound:
            halted = f"divergence after game {g + 1}: max |w_i| = {worst:.6g} > {divergence_bound:g}"
            log.warning(halted)
            break
    return TrainResult(w, track, curve, snapshots, played_games, halted)


def write_curve(path, curve) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("game_index,rating,rating_sigma,result,weight_snapshot_id\n")
        for g, r, s, res, snap in curve:
            fh.write(f"{g},{r:.6f},{s:.6f},{res:g},{snap}\n")


# --- depth comparisons ----------------------------------------------------------


def sample_positions(game: Game, count: int, seed: int) -> list:
    """Non-terminal positions visited by uniformly random playouts."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        first = Role.LEARNER if rng.random() < 0.5 else Role.OPPONENT
        state = game.initial_state(first, rng if game.stochastic else None)
        while state.result is None and len(out) < count:
            out.append(state)
            actions = game.legal_actions(state)
            a = actions[int(rng.integers(len(actions)))]
            state = game.successor(state, a, game.sample_event(state, a, rng))
    return out


def disagreement_rate(
    w: ParamVector,
    game: Game,
    positions: int,
    d1: int,
    d2: int,
    seed: int,
    squash: SquashConfig | None = None,
) -> float:
    """Fraction of sampled positions where depth-d1 and depth-d2 searches pick different moves."""
    if positions <= 0:
        return 0.0
    ev = Evaluator(game, squash or SquashConfig(True))
    c1, c2 = SearchConfig(d1), SearchConfig(d2)
    differ = 0
    states = sample_positions(game, positions, seed)
    for s in states:
        if d1 == d2 or len(game.legal_actions(s)) == 1:
            continue
        if search(ev, s, w, c1).pv[0] != search(ev, s, w, c2).pv[0]:
            differ += 1
    return differ / len(states)


__all__ = [
    "AgentSpec",
    "INITIAL_RATING",
    "MatchRecord",
    "PlayedGame",
    "TrainResult",
    "act",
    "calibrate_pool",
    "default_pool",
    "disagreement_rate",
    "game_rng",
    "play_game",
    "pool_ratings",
    "reference_weights",
    "run_match",
    "sample_positions",
    "train",
    "write_curve",
]
