"""Elo-style rating surrogate used to track learners against a fixed pool."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

K_FACTOR = 32.0
SCALE = 400.0
INITIAL_RATING = 1500.0
PRIOR_SIGMA = 350.0
_Q = math.log(10) / SCALE


def expected_score(rating: float, opponent: float) -> float:
    return 1.0 / (1.0 + 10.0 ** ((opponent - rating) / SCALE))


@dataclass
class RatingTrack:
    """Per-game rating history of one player.

    ``sigma`` is the inverse square root of the accumulated Fisher
    information of the logistic model plus a prior, so it shrinks with every
    game played.
    """

    k_factor: float = K_FACTOR
    ratings: list[float] = field(default_factory=lambda: [INITIAL_RATING])
    sigmas: list[float] = field(default_factory=lambda: [PRIOR_SIGMA])
    info: float = 1.0 / PRIOR_SIGMA**2

    @property
    def rating(self) -> float:
        return self.ratings[-1]

    @property
    def sigma(self) -> float:
        return self.sigmas[-1]

    @property
    def games(self) -> int:
        return len(self.ratings) - 1


def rating_update(track: RatingTrack, result: float, opponent_rating: float) -> RatingTrack:
    """Apply one game's result (1 win, 0.5 draw, 0 loss); the track is extended in place and returned."""
    if result not in (0.0, 0.5, 1.0):
        raise ValueError(f"result must be 0, 0.5 or 1, got {result}")
    e = expected_score(track.rating, opponent_rating)
    track.ratings.append(track.rating + track.k_factor * (result - e))
    track.info += _Q * _Q * e * (1.0 - e)
    track.sigmas.append(1.0 / math.sqrt(track.info))
    return track


def games_to_threshold(track: RatingTrack, threshold: float) -> int | None:
    """First game count after which the rating is at or above ``threshold``."""
    for g, r in enumerate(track.ratings):
        if g > 0 and r >= threshold:
            return g
    return None


def fit_ratings(
    names: Sequence[str],
    scores: Mapping[tuple[str, str], tuple[float, int]],
    anchor: float = INITIAL_RATING,
    prior_sigma: float = 800.0,
    iterations: int = 2000,
) -> dict[str, float]:
    """Maximum-a-posteriori logistic ratings from pairwise results.

    ``scores[(a, b)] = (points of a, games)``. Draws count as half points. A
    weak Gaussian prior around ``anchor`` keeps ratings finite when one side
    never scores; the mean rating is pinned to ``anchor``.
    """
    idx = {n: i for i, n in enumerate(names)}
    r = np.zeros(len(names))
    pairs = [(idx[a], idx[b], pts, n) for (a, b), (pts, n) in scores.items()]
    for _ in range(iterations):
        grad = -r / prior_sigma**2
        hess = np.full(len(names), 1.0 / prior_sigma**2)
        for i, j, pts, n in pairs:
            e = 1.0 / (1.0 + 10.0 ** ((r[j] - r[i]) / SCALE))
            g = _Q * (pts - n * e)
            grad[i] += g
            grad[j] -= g
            h = _Q * _Q * n * e * (1 - e)
            hess[i] += h
            hess[j] += h
        step = grad / hess
        r += step
        r -= r.mean()
        if np.max(np.abs(step)) < 1e-9:
            break
    return {n: float(anchor + r[idx[n]]) for n in names}
