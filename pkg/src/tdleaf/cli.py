"""Command-line entry point.

Exit codes: 0 success, 1 validation or input error, 2 training divergence,
3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as config_mod
from .evaluation import (
    Evaluator,
    ParamVector,
    SquashConfig,
    grad_check,
    initial_weights,
    load_weights,
    save_weights,
)
from .games import get_game
from .harness import AgentSpec, disagreement_rate, run_match, sample_positions, train, write_curve
from .search import SearchConfig
from .solve import StateSpaceCapExceeded, solve_exact
from .td import UpdateConfig
from .verify import GRAD_TOL_LINEAR, GRAD_TOL_TANH, SUITES, run_suite

EXIT_OK, EXIT_INVALID, EXIT_DIVERGED, EXIT_VERIFY = 0, 1, 2, 3

log = logging.getLogger("tdleaf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override the configured seed")
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory (overrides the config)")
    p.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="worker processes for matches")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="tdleaf", description=__doc__.splitlines()[0], parents=[common])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", parents=[common], help="train a learner from a config file")
    p.add_argument("config")
    p = sub.add_parser("match", parents=[common], help="fixed-weight match from a config file")
    p.add_argument("config")
    p = sub.add_parser("disagreement", parents=[common], help="depth disagreement and paired match")
    p.add_argument("config")

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--positions", type=int, default=None, help="positions per game")

    p = sub.add_parser("solve", parents=[common], help="exact game-theoretic value of a state")
    p.add_argument("game")
    p.add_argument("--state", default=None, help="serialized state (default: initial position)")
    p.add_argument("--cap", type=int, default=2_000_000, help="state-space cap")

    p = sub.add_parser("grad-check", parents=[common], help="analytic vs finite-difference gradients")
    p.add_argument("game")
    p.add_argument("--weights", default=None, help="weight file (default: uniform random in [-1, 1])")
    p.add_argument("--positions", type=int, default=1000)
    p.add_argument("--no-squash", action="store_true", help="check the linear evaluator")
    return parser


# --- helpers -----------------------------------------------------------------


def _output_dir(args, cfg) -> Path:
    out = Path(getattr(args, "out", None) or cfg.experiment.output)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_config(args):
    cfg = config_mod.load(args.config)
    if hasattr(args, "seed"):
        cfg.experiment.seed = args.seed
    if hasattr(args, "workers"):
        cfg.experiment.workers = args.workers
    cfg.validate()
    return cfg


def _squash(cfg) -> SquashConfig:
    return SquashConfig(cfg.squash.enabled, cfg.squash.beta)


def _read_weights(cfg, ref: str, game):
    path = cfg.resolve(ref)
    if not path.is_file():
        raise FileNotFoundError(f"weight file not found: {path}")
    w, game_name, squash = load_weights(path)
    if game_name != game.name:
        raise ValueError(f"weight file {path} is for {game_name!r}, not {game.name!r}")
    return w, squash


def _agent(cfg, game, name: str, ref: str, depth: int, epsilon: float = 0.0) -> AgentSpec:
    if ref in ("random", "optimal"):
        return AgentSpec(name, policy=ref, epsilon=epsilon)
    w, squash = _read_weights(cfg, ref, game)
    return AgentSpec(name, w, SearchConfig(depth), epsilon, squash=squash)


def _initial(cfg, game) -> ParamVector:
    init = cfg.training.init
    if init in ("zero", "material", "pawn"):
        return initial_weights(game, init)
    return _read_weights(cfg, init, game)[0]


# --- commands -----------------------------------------------------------------


def cmd_train(args) -> int:
    cfg = _load_config(args)
    game = get_game(cfg.experiment.game)
    ln, tr = cfg.learning, cfg.training
    ucfg = UpdateConfig(ln.algorithm, ln.lam, ln.alpha, ln.schedule, ln.depth, ln.positions, ln.clip_norm)
    out = _output_dir(args, cfg)
    squash = _squash(cfg)
    res = train(
        game, tr.regime, tr.games, ucfg, cfg.experiment.seed, init=_initial(cfg, game), squash=squash,
        epsilon=ln.epsilon, snapshot_every=tr.snapshot_every, divergence_bound=tr.divergence_bound,
    )
    write_curve(out / "curve.csv", res.curve)
    wdir = out / "weights"
    wdir.mkdir(exist_ok=True)
    for snap, w in res.snapshots.items():
        save_weights(wdir / f"{snap}.txt", w, game.name, squash)
    save_weights(wdir / "final.txt", res.weights, game.name, squash)
    report = [
        f"game {game.name}",
        f"regime {tr.regime}",
        f"algorithm {ln.algorithm}",
        f"seed {cfg.experiment.seed}",
        f"games_played {res.games_played}",
        f"final_rating {res.track.rating:.6f}",
        f"final_sigma {res.track.sigma:.6f}",
        "weights " + " ".join(f"{n}={v:.6g}" for n, v in zip(res.weights.names, res.weights.w)),
        f"weights_sha256 {res.weights.digest()}",
        f"halted {res.halted or 'no'}",
    ]
    (out / "report.txt").write_text("\n".join(report) + "\n")
    print("\n".join(report))
    if res.halted:
        print(f"error: {res.halted}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def _mirrored(flag: str):
    return None if flag == "auto" else flag == "true"


def cmd_match(args) -> int:
    cfg = _load_config(args)
    game = get_game(cfg.experiment.game)
    m = cfg.match
    a = _agent(cfg, game, m.a_name, m.a_weights, m.a_depth, m.a_epsilon)
    b = _agent(cfg, game, m.b_name, m.b_weights, m.b_depth, m.b_epsilon)
    out = _output_dir(args, cfg)
    rec = run_match(a, b, game, m.games, cfg.experiment.seed, cfg.experiment.workers, _mirrored(m.mirrored))
    (out / "match.txt").write_text(rec.dumps())
    print(
        f"{rec.agent_a} {rec.points_a:g} - {rec.points_b:g} {rec.agent_b} "
        f"(+{rec.wins_a} ={rec.draws} -{rec.wins_b}, {rec.games} games)"
    )
    return EXIT_OK


def cmd_disagreement(args) -> int:
    cfg = _load_config(args)
    game = get_game(cfg.experiment.game)
    d = cfg.disagreement
    w, squash = _read_weights(cfg, d.weights, game)
    out = _output_dir(args, cfg)
    seed = cfg.experiment.seed
    rate = disagreement_rate(w, game, d.positions, d.d1, d.d2, seed, squash)
    lines = [
        f"game {game.name}",
        f"seed {seed}",
        f"positions {d.positions}",
        f"depths {d.d1} {d.d2}",
        f"disagreement {rate:.6f}",
    ]
    if d.match_games:
        deep = AgentSpec(f"d{d.d2}", w, SearchConfig(d.d2), squash=squash)
        shallow = AgentSpec(f"d{d.d1}", w, SearchConfig(d.d1), squash=squash)
        rec = run_match(deep, shallow, game, d.match_games, seed, cfg.experiment.workers)
        (out / "match.txt").write_text(rec.dumps())
        lines.append(f"match_games {rec.games}")
        lines.append(f"points_per_game_delta {rec.points_per_game_delta:.6f}")
    (out / "disagreement.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, args.positions, getattr(args, "seed", 0))
    for c in checks:
        print(c)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def cmd_solve(args) -> int:
    game = get_game(args.game)
    state = game.parse(args.state) if args.state else game.initial_state()
    try:
        value = solve_exact(game, state, args.cap)
    except StateSpaceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"{value:.17g}")
    return EXIT_OK


def cmd_grad_check(args) -> int:
    game = get_game(args.game)
    seed = getattr(args, "seed", 0)
    rng = np.random.default_rng(seed)
    squash = SquashConfig(not args.no_squash)
    fixed = None
    if args.weights:
        path = Path(args.weights)
        if not path.is_file():
            raise FileNotFoundError(f"weight file not found: {path}")
        fixed, _, _ = load_weights(path)
    ev = Evaluator(game, squash)
    worst = 0.0
    for s in sample_positions(game, args.positions, seed):
        w = fixed.w if fixed is not None else rng.uniform(-1, 1, game.k)
        worst = max(worst, grad_check(ev, s, w))
    tol = GRAD_TOL_TANH if squash.enabled else GRAD_TOL_LINEAR
    ok = worst <= tol
    print(f"max relative error {worst:.3e} ({'PASS' if ok else 'FAIL'}, tolerance {tol:g})")
    return EXIT_OK if ok else EXIT_VERIFY


COMMANDS = {
    "train": cmd_train,
    "match": cmd_match,
    "disagreement": cmd_disagreement,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "grad-check": cmd_grad_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (config_mod.ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
