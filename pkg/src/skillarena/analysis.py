"""Ranking-quality analytics: Kendall tau, percentiles, agreement statistics.

Rankings from different rounds of one arena are compared with the tie-corrected
Kendall tau-b; absolute scores are mapped onto a [0, 100] percentile scale so
arenas of different actions become comparable. Everything here is pure and
emits plain CSV for external plotting.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from scipy.stats import kendalltau

from .aggregation import AggregatedOutcome
from .errors import DomainError, DuplicatePlayerError
from .ratings import Outcome

TAU_SERIES_COLUMNS = ["arena_id", "round", "tau"]
PERCENTILE_COLUMNS = ["arena_id", "segment_id", "percentile"]
AGREEMENT_SUMMARY_COLUMNS = [
    "arena_id",
    "total_comparisons",
    "mean_agreement",
    "winner_balance",
]
AGREEMENT_DISTRIBUTION_COLUMNS = ["arena_id", "metric", "value", "count"]


@dataclass(frozen=True)
class Ranking:
    """Players ordered by score descending; equal scores tie-break by id."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for player, _ in self.entries:
            if player in seen:
                raise DuplicatePlayerError(f"duplicate player {player!r} in ranking", player=player)
            seen.add(player)
        for (_, s1), (_, s2) in zip(self.entries, self.entries[1:]):
            if s1 < s2:
                raise DomainError("ranking must be sorted by descending score")

    @classmethod
    def from_scores(cls, scores: Mapping[str, float]) -> "Ranking":
        ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
        return cls(tuple(ordered))

    @property
    def players(self) -> frozenset[str]:
        return frozenset(p for p, _ in self.entries)

    def scores(self) -> dict[str, float]:
        return dict(self.entries)


@dataclass(frozen=True)
class TauSeries:
    """(round index, tau) pairs with strictly increasing round indices."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        for (r1, _), (r2, _) in zip(self.entries, self.entries[1:]):
            if r2 <= r1:
                raise DomainError("round indices must be strictly increasing")

    def taus(self) -> list[float]:
        return [t for _, t in self.entries]

    def final_tau(self) -> float:
        if not self.entries:
            raise DomainError("empty tau series")
        return self.entries[-1][1]


def kendall_tau(a: Ranking, b: Ranking) -> float:
    """Tie-corrected Kendall tau-b between two rankings of the same players.

    Returns 0.0 when either ranking carries no ordinal information (all scores
    tied), where tau-b is otherwise undefined.
    """
    if a.players != b.players:
        raise DomainError("rankings must cover identical player sets")
    order = sorted(a.players)
    scores_a = a.scores()
    scores_b = b.scores()
    x = [scores_a[p] for p in order]
    y = [scores_b[p] for p in order]
    tau = kendalltau(x, y, variant="b").statistic
    if tau != tau:  # NaN: zero variance on one side
        return 0.0
    return float(tau)


def consecutive_taus(rankings_by_round: Sequence[Ranking]) -> TauSeries:
    """Tau between each adjacent pair of round rankings; entry r compares r to r+1."""
    if len(rankings_by_round) < 2:
        raise DomainError("need at least two rankings")
    entries = [
        (i, kendall_tau(rankings_by_round[i - 1], rankings_by_round[i]))
        for i in range(1, len(rankings_by_round))
    ]
    return TauSeries(tuple(entries))


def to_percentiles(ranking: Ranking) -> dict[str, float]:
    """Map ranks onto [0, 100]: best 100, worst 0, ties share the mean.

    Rank r of n (1-based, no ties) maps to 100 * (n - r) / (n - 1).
    """
    n = len(ranking.entries)
    if n < 2:
        raise DomainError(f"need at least 2 players, got {n}")
    out: dict[str, float] = {}
    i = 0
    while i < n:
        j = i
        while j + 1 < n and ranking.entries[j + 1][1] == ranking.entries[i][1]:
            j += 1
        shared = sum(100.0 * (n - r) / (n - 1) for r in range(i + 1, j + 2)) / (j - i + 1)
        for k in range(i, j + 1):
            out[ranking.entries[k][0]] = shared
        i = j + 1
    return out


@dataclass(frozen=True)
class AgreementStats:
    mean_agreement: float
    agreement_distribution: dict[float, int]
    vote_difference_distribution: dict[float, int]
    winner_balance: float
    total_comparisons: int


def _votes_for_right(outcome: AggregatedOutcome) -> float:
    if outcome.outcome is Outcome.SECOND_WINS:
        return (outcome.vote_count + outcome.vote_difference) / 2.0
    if outcome.outcome is Outcome.FIRST_WINS:
        return (outcome.vote_count - outcome.vote_difference) / 2.0
    return outcome.vote_count / 2.0


def agreement_stats(outcomes: Sequence[AggregatedOutcome]) -> AgreementStats:
    """Summarize agreement rates, vote differences, and left/right balance.

    winner_balance is 1 + (votes for the second-presented video / all votes):
    1 means the first side took every vote, 1.5 is a perfectly even split.
    """
    if not outcomes:
        raise DomainError("need at least one aggregated outcome")
    total_votes = sum(o.vote_count for o in outcomes)
    right_votes = sum(_votes_for_right(o) for o in outcomes)
    return AgreementStats(
        mean_agreement=sum(o.agreement_rate for o in outcomes) / len(outcomes),
        agreement_distribution=dict(Counter(o.agreement_rate for o in outcomes)),
        vote_difference_distribution=dict(Counter(o.vote_difference for o in outcomes)),
        winner_balance=1.0 + right_votes / total_votes,
        total_comparisons=len(outcomes),
    )


def write_tau_series_csv(
    series_by_arena: Mapping[str, TauSeries], path: str | Path, include_mean: bool = True
) -> None:
    """Per-arena (arena_id, round, tau) rows plus an unweighted `mean` arena row."""
    rows: list[tuple[str, int, float]] = []
    for arena_id in sorted(series_by_arena):
        for rnd, tau in series_by_arena[arena_id].entries:
            rows.append((arena_id, rnd, tau))
    if include_mean and series_by_arena:
        by_round: dict[int, list[float]] = {}
        for series in series_by_arena.values():
            for rnd, tau in series.entries:
                by_round.setdefault(rnd, []).append(tau)
        for rnd in sorted(by_round):
            rows.append(("mean", rnd, sum(by_round[rnd]) / len(by_round[rnd])))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TAU_SERIES_COLUMNS)
        writer.writerows(rows)


def write_percentiles_csv(
    tables_by_arena: Mapping[str, Mapping[str, float]], path: str | Path
) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PERCENTILE_COLUMNS)
        for arena_id in sorted(tables_by_arena):
            table = tables_by_arena[arena_id]
            for segment_id in sorted(table, key=lambda s: (-table[s], s)):
                writer.writerow([arena_id, segment_id, table[segment_id]])


def write_agreement_csv(
    stats_by_arena: Mapping[str, AgreementStats],
    summary_path: str | Path,
    distribution_path: str | Path | None = None,
) -> None:
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGREEMENT_SUMMARY_COLUMNS)
        for arena_id in sorted(stats_by_arena):
            s = stats_by_arena[arena_id]
            writer.writerow([arena_id, s.total_comparisons, s.mean_agreement, s.winner_balance])
    if distribution_path is None:
        return
    with open(distribution_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGREEMENT_DISTRIBUTION_COLUMNS)
        for arena_id in sorted(stats_by_arena):
            s = stats_by_arena[arena_id]
            for value in sorted(s.agreement_distribution):
                writer.writerow([arena_id, "agreement_rate", value, s.agreement_distribution[value]])
            for value in sorted(s.vote_difference_distribution):
                writer.writerow(
                    [arena_id, "vote_difference", value, s.vote_difference_distribution[value]]
                )
