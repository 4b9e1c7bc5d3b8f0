"""Experiment configuration files.

A config is INI text with fixed sections. Unknown sections or keys are
rejected with the offending line number. Relative weight-file paths are
resolved against the directory of the config file::

    [experiment]
    command = train
    game = minichess
    seed = 1
    output = runs/minichess-pool

    [learning]
    algorithm = tdleaf
    lambda = 0.7
    alpha = 1.0
"""

from __future__ import annotations

import configparser
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .evaluation import DEFAULT_BETA
from .td import ALGORITHMS, SCHEDULES

COMMANDS = ("train", "match", "disagreement")
REGIMES = ("self-play", "pool")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentSection:
    command: str = "train"
    game: str = "tictactoe"
    seed: int = 0
    output: str = "runs/out"
    workers: int = 1


@dataclass
class LearningSection:
    algorithm: str = "tdleaf"
    # ``lambda`` in the file
    lam: float = 0.7
    alpha: float = 1.0
    schedule: str = "constant"
    depth: int = 2
    positions: str = "learner"
    epsilon: float | None = None
    clip_norm: float | None = None


@dataclass
class TrainingSection:
    regime: str = "pool"
    games: int = 100
    init: str = "zero"
    snapshot_every: int = 0
    divergence_bound: float = 1e6


@dataclass
class SquashSection:
    enabled: bool = True
    beta: float = DEFAULT_BETA


@dataclass
class MatchSection:
    games: int = 100
    a_name: str = "a"
    a_weights: str = ""
    a_depth: int = 2
    b_name: str = "b"
    b_weights: str = ""
    b_depth: int = 2
    a_epsilon: float = 0.0
    b_epsilon: float = 0.0
    mirrored: str = "auto"


@dataclass
class DisagreementSection:
    weights: str = ""
    d1: int = 1
    d2: int = 2
    positions: int = 10_000
    match_games: int = 0


@dataclass
class ExperimentConfig:
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    learning: LearningSection = field(default_factory=LearningSection)
    training: TrainingSection = field(default_factory=TrainingSection)
    squash: SquashSection = field(default_factory=SquashSection)
    match: MatchSection = field(default_factory=MatchSection)
    disagreement: DisagreementSection = field(default_factory=DisagreementSection)
    #: directory used to resolve relative weight paths
    base_dir: Path = field(default=Path("."), compare=False, repr=False)

    def validate(self) -> None:
        e, ln, t, m, d = self.experiment, self.learning, self.training, self.match, self.disagreement
        checks = [
            (e.command in COMMANDS, "experiment.command", f"must be one of {COMMANDS}"),
            (e.workers >= 1, "experiment.workers", "must be >= 1"),
            (ln.algorithm in ALGORITHMS, "learning.algorithm", f"must be one of {ALGORITHMS}"),
            (0.0 <= ln.lam <= 1.0, "learning.lambda", "λ ∈ [0,1] required"),
            (ln.alpha >= 0.0, "learning.alpha", "must be >= 0"),
            (ln.schedule in SCHEDULES, "learning.schedule", f"must be one of {SCHEDULES}"),
            (ln.depth >= 0, "learning.depth", "must be >= 0"),
            (ln.positions in ("learner", "all"), "learning.positions", "must be 'learner' or 'all'"),
            (ln.epsilon is None or 0.0 <= ln.epsilon <= 1.0, "learning.epsilon", "must lie in [0, 1]"),
            (t.regime in REGIMES, "training.regime", f"must be one of {REGIMES}"),
            (t.games >= 1, "training.games", "must be >= 1"),
            (t.snapshot_every >= 0, "training.snapshot_every", "must be >= 0"),
            (t.divergence_bound > 0, "training.divergence_bound", "must be positive"),
            (self.squash.beta > 0, "squash.beta", "must be positive"),
            (m.games >= 1, "match.games", "must be >= 1"),
            (m.a_depth >= 1 and m.b_depth >= 1, "match.a_depth/b_depth", "must be >= 1"),
            (0.0 <= min(m.a_epsilon, m.b_epsilon) <= max(m.a_epsilon, m.b_epsilon) <= 1.0,
             "match.a_epsilon/b_epsilon", "must lie in [0, 1]"),
            (m.mirrored in ("auto", "true", "false"), "match.mirrored", "must be auto, true or false"),
            (d.d1 >= 1 and d.d2 >= 1, "disagreement.d1/d2", "must be >= 1"),
            (d.positions >= 0 and d.match_games >= 0, "disagreement.positions", "counts must be >= 0"),
        ]
        if e.command == "disagreement":
            checks.append((d.d1 != d.d2, "disagreement.d2", "must differ from d1"))
        for ok, key, msg in checks:
            if not ok:
                raise ConfigError(f"{key}: {msg}")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def dumps(self) -> str:
        out = []
        for f in fields(self):
            if f.name == "base_dir":
                continue
            out.append(f"[{f.name}]")
            for key, value in asdict(getattr(self, f.name)).items():
                if value is None:
                    continue
                name = "lambda" if key == "lam" else key
                if isinstance(value, bool):
                    value = "true" if value else "false"
                elif isinstance(value, float):
                    value = repr(value)
                out.append(f"{name} = {value}")
            out.append("")
        return "\n".join(out)


def _convert(section: str, key: str, raw: str, kind, line: int):
    text = raw.strip()
    try:
        if kind is bool:
            if text.lower() in ("true", "yes", "on", "1"):
                return True
            if text.lower() in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "float|None":
            return None if text.lower() in ("", "none") else float(text)
        return text
    except ValueError:
        raise ConfigError(f"line {line}: bad value {text!r} for {section}.{key}") from None


_KINDS = {"int": "int", "float": "float", "float|None": "float|None", "bool": bool, "str": str}


def _kind(annotation: str):
    return _KINDS[annotation.replace(" ", "")]


def loads(text: str, base_dir: Path | str = ".") -> ExperimentConfig:
    """Parse and validate config text; errors name the key and its line."""
    # locate every key for error messages; configparser keeps no line numbers
    lines: dict[tuple[str, str], int] = {}
    section = None
    for n, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        m = re.match(r"^\[(.+)\]$", s)
        if m:
            section = m.group(1).strip()
            lines.setdefault((section, ""), n)
            continue
        key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
        lines.setdefault((section or "", key), n)

    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    cfg = ExperimentConfig(base_dir=Path(base_dir))
    sections = {f.name: f for f in fields(cfg) if f.name != "base_dir"}
    for name in parser.sections():
        if name not in sections:
            raise ConfigError(f"line {lines.get((name, ''), '?')}: unknown section [{name}]")
        target = getattr(cfg, name)
        known = {("lambda" if f.name == "lam" else f.name): f for f in fields(target)}
        for key, raw in parser.items(name):
            line = lines.get((name, key), "?")
            if key not in known:
                raise ConfigError(f"line {line}: unknown key {key!r} in [{name}]")
            f = known[key]
            setattr(target, f.name, _convert(name, key, raw, _kind(f.type), line))
    try:
        cfg.validate()
    except ConfigError as exc:
        key = str(exc).split(":")[0]
        sec, _, k = key.partition(".")
        k = k.split("/")[0]
        line = lines.get((sec, k))
        raise ConfigError(f"line {line}: {exc}" if line else str(exc)) from None
    return cfg


def load(path: Path | str) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    return loads(text, path.parent)
