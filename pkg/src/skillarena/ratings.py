"""ELO expected scores and rating updates.

Ratings start at 0.0 and move by ``k_factor * (actual - expected)`` per match,
with the expectation given by a logistic curve of the rating gap (scale 400).
Round updates are simultaneous: every expectation is computed against the
ratings at the start of the round, so replaying a round is independent of the
order its results arrive in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    DuplicatePlayerError,
    NonFiniteRatingError,
    UnknownPlayerError,
)

DEFAULT_K_FACTOR = 32.0
INITIAL_RATING = 0.0


class Outcome(enum.Enum):
    """Match result from the first player's point of view."""

    FIRST_WINS = "first_wins"
    SECOND_WINS = "second_wins"
    DRAW = "draw"

    @property
    def first_score(self) -> float:
        if self is Outcome.FIRST_WINS:
            return 1.0
        if self is Outcome.SECOND_WINS:
            return 0.0
        return 0.5

    @property
    def second_score(self) -> float:
        return 1.0 - self.first_score

    def mirrored(self) -> "Outcome":
        if self is Outcome.FIRST_WINS:
            return Outcome.SECOND_WINS
        if self is Outcome.SECOND_WINS:
            return Outcome.FIRST_WINS
        return Outcome.DRAW


@dataclass(frozen=True)
class MatchResult:
    first: str
    second: str
    outcome: Outcome

    def __post_init__(self) -> None:
        if self.first == self.second:
            raise DuplicatePlayerError(
                f"match pairs player {self.first!r} with itself", player=self.first
            )


def expected_score(r_a: float, r_b: float) -> tuple[float, float]:
    """Expected scores (e_a, e_b) for ratings r_a vs r_b.

    Both sides are evaluated symmetrically; e_a + e_b == 1 up to float error.
    """
    if not (math.isfinite(r_a) and math.isfinite(r_b)):
        raise NonFiniteRatingError(f"ratings must be finite, got ({r_a}, {r_b})")
    e_a = 1.0 / (1.0 + 10.0 ** ((r_b - r_a) / 400.0))
    e_b = 1.0 / (1.0 + 10.0 ** ((r_a - r_b) / 400.0))
    return e_a, e_b


@dataclass(frozen=True)
class RatingBook:
    """Immutable map of player id -> rating plus the update step size."""

    ratings: dict[str, float] = field(default_factory=dict)
    k_factor: float = DEFAULT_K_FACTOR

    def __post_init__(self) -> None:
        if not (math.isfinite(self.k_factor) and self.k_factor > 0):
            raise NonFiniteRatingError(f"k_factor must be positive, got {self.k_factor}")

    @classmethod
    def zeros(cls, players: Iterable[str], k_factor: float = DEFAULT_K_FACTOR) -> "RatingBook":
        return cls({p: INITIAL_RATING for p in players}, k_factor)

    def rating(self, player: str) -> float:
        try:
            return self.ratings[player]
        except KeyError:
            raise UnknownPlayerError(f"player {player!r} not in rating book", player=player)

    def with_ratings(self, updates: Mapping[str, float]) -> "RatingBook":
        merged = dict(self.ratings)
        merged.update(updates)
        return RatingBook(merged, self.k_factor)

    def total(self) -> float:
        return sum(self.ratings.values())


def _match_deltas(book: RatingBook, result: MatchResult) -> dict[str, float]:
    r_first = book.rating(result.first)
    r_second = book.rating(result.second)
    e_first, e_second = expected_score(r_first, r_second)
    k = book.k_factor
    return {
        result.first: k * (result.outcome.first_score - e_first),
        result.second: k * (result.outcome.second_score - e_second),
    }


def apply_match(book: RatingBook, result: MatchResult) -> RatingBook:
    """New book with both players of one match updated; everyone else untouched."""
    deltas = _match_deltas(book, result)
    return book.with_ratings({p: book.rating(p) + d for p, d in deltas.items()})


def apply_round(book: RatingBook, results: Iterable[MatchResult]) -> RatingBook:
    """Apply a round of results simultaneously.

    All expectations are computed from the start-of-round book, then the deltas
    are applied in one step. A player may appear in at most one result.
    """
    deltas: dict[str, float] = {}
    for result in results:
        for player in (result.first, result.second):
            if player in deltas:
                raise DuplicatePlayerError(
                    f"player {player!r} appears in more than one match this round",
                    player=player,
                )
        deltas.update(_match_deltas(book, result))
    if not deltas:
        return book
    return book.with_ratings({p: book.rating(p) + d for p, d in deltas.items()})
