"""Swiss-tournament round generation.

Players are sorted by current rating (ties broken lexicographically by id) and
paired adjacently, with depth-first backtracking to the next-nearest candidate
whenever a pair has already played. If no repeat-free perfect matching exists
at all (only possible once the schedule outlives a round robin), the fallback
picks the matching with the fewest repeats and, among those, the smallest total
rating gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import ArenaTooSmallError, DomainError, DuplicatePlayerError

# Exact (fewest-rematches, smallest-gap) fallback is a subset DP; beyond this
# size it degrades to first-found search with a rematch budget.
_EXACT_FALLBACK_MAX_PLAYERS = 18


@dataclass(frozen=True)
class Standings:
    """Players ordered best-first: rating descending, equal ratings by id."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for player, _ in self.entries:
            if player in seen:
                raise DuplicatePlayerError(f"duplicate player {player!r} in standings", player=player)
            seen.add(player)
        for (_, r1), (_, r2) in zip(self.entries, self.entries[1:]):
            if r1 < r2:
                raise DomainError("standings must be sorted by descending rating")

    @classmethod
    def from_ratings(cls, ratings: Mapping[str, float]) -> "Standings":
        ordered = sorted(ratings.items(), key=lambda item: (-item[1], item[0]))
        return cls(tuple(ordered))

    @property
    def players(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.entries)

    def rating_of(self, player: str) -> float:
        for p, r in self.entries:
            if p == player:
                return r
        raise DomainError(f"player {player!r} not in standings")


@dataclass(frozen=True)
class MatchHistory:
    """Unordered pairs that have already met."""

    played: frozenset[frozenset[str]] = frozenset()

    def __post_init__(self) -> None:
        for pair in self.played:
            if len(pair) != 2:
                raise DomainError(f"history pair must have two distinct players: {sorted(pair)}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "MatchHistory":
        return cls(frozenset(frozenset(p) for p in pairs))

    def contains(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.played

    def with_pairs(self, pairs: Iterable[tuple[str, str]]) -> "MatchHistory":
        return MatchHistory(self.played | {frozenset(p) for p in pairs})

    def __len__(self) -> int:
        return len(self.played)


@dataclass(frozen=True)
class RoundPairing:
    """One round's matches, the bye for odd fields, and how many are repeats."""

    matches: tuple[tuple[str, str], ...]
    bye: str | None = None
    rematch_count: int = 0

    def players(self) -> set[str]:
        out = {p for match in self.matches for p in match}
        if self.bye is not None:
            out.add(self.bye)
        return out

    def pair_sets(self) -> list[frozenset[str]]:
        return [frozenset(m) for m in self.matches]


def min_recommended_rounds(n: int) -> int:
    """ceil(log2 n): the usual minimum Swiss round count for n players."""
    if n < 2:
        raise DomainError(f"need at least 2 players, got {n}")
    return (n - 1).bit_length()


def coverage_fraction(n: int, rounds: int) -> float:
    """Fraction of all C(n,2) pairs a Swiss schedule of `rounds` rounds covers."""
    if n < 2:
        raise DomainError(f"need at least 2 players, got {n}")
    if rounds < 0:
        raise DomainError(f"rounds must be non-negative, got {rounds}")
    return min(1.0, rounds * (n // 2) / math.comb(n, 2))


# Screening limits: candidate rounds examined before settling for the first
# repeat-free one, search nodes spent proving a candidate keeps the rest of
# the schedule completable, and the residual density below which the exact
# packing screen replaces the one-step probe. All deterministic.
_SCREEN_CANDIDATES = 64
_SCREEN_NODE_BUDGET = 50_000
_EXACT_SCREEN_DEGREE = 7.0

_Round = tuple[list[tuple[str, str]], str | None]


def _unplayed_adjacency(
    order: Sequence[str], played: frozenset[frozenset[str]]
) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {p: set() for p in order}
    for i, a in enumerate(order):
        for b in order[i + 1 :]:
            if frozenset((a, b)) not in played:
                adj[a].add(b)
                adj[b].add(a)
    return adj


def _iter_rounds(
    order: Sequence[str],
    adj: Mapping[str, set[str]],
    bye_free: bool,
    budget: list[int] | None = None,
):
    """Yield repeat-free rounds (pairs, bye) in greedy-adjacent DFS order.

    The leading unmatched player tries partners nearest in standings first;
    for odd fields its bye branch comes last, which floats the bye toward the
    bottom of the standings. Reads `adj` lazily, so callers may mutate and
    restore it between yields. A `budget` caps DFS nodes (dead ends included)
    so exhaustive no-solution proofs cannot run away; exhaustion just stops
    the iteration early.
    """
    if budget is not None:
        budget[0] -= 1
        if budget[0] <= 0:
            return
    if not order:
        yield [], None
        return
    if len(order) == 1:
        if bye_free:
            yield [], order[0]
        return
    first = order[0]
    rest = order[1:]
    for i, candidate in enumerate(rest):
        if candidate not in adj[first]:
            continue
        for pairs, bye in _iter_rounds(rest[:i] + rest[i + 1 :], adj, bye_free, budget):
            yield [(first, candidate)] + pairs, bye
    if bye_free:
        for pairs, _ in _iter_rounds(rest, adj, False, budget):
            yield pairs, first


def _constrained_first(order: Sequence[str], adj: Mapping[str, set[str]]) -> list[str]:
    """Players with the fewest unplayed partners first (fail-first search order)."""
    pos = {p: i for i, p in enumerate(order)}
    return sorted(order, key=lambda p: (len(adj[p]), pos[p]))


def _packs_rounds(
    order: Sequence[str],
    adj: dict[str, set[str]],
    rounds_left: int,
    odd_field: bool,
    budget: list[int],
) -> bool:
    """Whether `rounds_left` more repeat-free rounds fit in the unplayed pairs."""
    if rounds_left <= 0:
        return True
    if odd_field:
        # each round grants one bye; players short of partners consume them
        deficit = sum(max(0, rounds_left - len(adj[p])) for p in order)
        if deficit > rounds_left:
            return False
    else:
        # no byes: every player must appear in every remaining round
        if any(len(adj[p]) != rounds_left for p in order):
            return False
    for pairs, _ in _iter_rounds(_constrained_first(order, adj), adj, odd_field, budget):
        if budget[0] <= 0:
            return False
        for a, b in pairs:
            adj[a].discard(b)
            adj[b].discard(a)
        ok = _packs_rounds(order, adj, rounds_left - 1, odd_field, budget)
        for a, b in pairs:
            adj[a].add(b)
            adj[b].add(a)
        if ok:
            return True
    return False


def _choose_round(order: Sequence[str], played: frozenset[frozenset[str]]) -> _Round | None:
    """First repeat-free round that does not strand the rest of the horizon.

    A round can be locally fine yet corner the tournament later (for example
    by leaving the unplayed graph as odd cycles), so candidates are screened:
    after removing the candidate, the residual must still pack the remaining
    rounds of an (n-1)-round horizon, which by induction from the complete
    graph carries the whole schedule through. While the residual is dense a
    one-step probe suffices. If no candidate survives screening (or search
    budgets run out), the first repeat-free round stands.
    """
    n = len(order)
    odd_field = n % 2 == 1
    per_round = n // 2
    adj = _unplayed_adjacency(order, played)
    pairs_played = n * (n - 1) // 2 - sum(len(s) for s in adj.values()) // 2
    first_found: _Round | None = None
    budget = [_SCREEN_NODE_BUDGET]
    for attempt, (pairs, bye) in enumerate(_iter_rounds(order, adj, odd_field)):
        if first_found is None:
            first_found = (pairs, bye)
        if attempt >= _SCREEN_CANDIDATES or budget[0] <= 0:
            break
        rounds_left = (n - 1) - (pairs_played + len(pairs)) // per_round
        if rounds_left <= 0:
            return pairs, bye
        for a, b in pairs:
            adj[a].discard(b)
            adj[b].discard(a)
        remaining = sum(len(s) for s in adj.values()) // 2
        if 2 * remaining / n > _EXACT_SCREEN_DEGREE:
            probe = _iter_rounds(_constrained_first(order, adj), adj, odd_field, budget)
            ok = next(probe, None) is not None
        else:
            ok = _packs_rounds(order, adj, rounds_left, odd_field, budget)
        for a, b in pairs:
            adj[a].add(b)
            adj[b].add(a)
        if ok:
            return pairs, bye
    return first_found


def _pair_min_cost_exact(
    order: Sequence[str],
    ratings: Mapping[str, float],
    played: frozenset[frozenset[str]],
) -> list[tuple[str, str]]:
    """Matching minimizing (rematch count, total rating gap) by subset DP."""
    n = len(order)

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[int, float, tuple[tuple[int, int], ...]]:
        if mask == 0:
            return (0, 0.0, ())
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        choice: tuple[int, float, tuple[tuple[int, int], ...]] | None = None
        for j in range(i + 1, n):
            if not (rest >> j) & 1:
                continue
            sub = best(rest & ~(1 << j))
            rematch = 1 if frozenset((order[i], order[j])) in played else 0
            gap = abs(ratings[order[i]] - ratings[order[j]])
            cand = (sub[0] + rematch, sub[1] + gap, ((i, j),) + sub[2])
            if choice is None or (cand[0], cand[1]) < (choice[0], choice[1]):
                choice = cand
        assert choice is not None
        return choice

    _, _, idx_pairs = best((1 << n) - 1)
    best.cache_clear()
    return [(order[i], order[j]) for i, j in sorted(idx_pairs)]


def _pair_with_budget(
    order: Sequence[str],
    played: frozenset[frozenset[str]],
    budget: int,
    nodes: list[int],
) -> list[tuple[str, str]] | None:
    if nodes[0] <= 0:
        return None
    nodes[0] -= 1
    if not order:
        return []
    first = order[0]
    rest = order[1:]
    for i, candidate in enumerate(rest):
        rematch = 1 if frozenset((first, candidate)) in played else 0
        if rematch > budget:
            continue
        sub = _pair_with_budget(rest[:i] + rest[i + 1 :], played, budget - rematch, nodes)
        if sub is not None:
            return [(first, candidate)] + sub
    return None


def _pair_first_fit(
    order: Sequence[str], played: frozenset[frozenset[str]]
) -> list[tuple[str, str]]:
    """No-backtracking closing: prefer unplayed partners, repeat when stuck."""
    out: list[tuple[str, str]] = []
    remaining = list(order)
    while remaining:
        first = remaining.pop(0)
        pick = next(
            (c for c in remaining if frozenset((first, c)) not in played), remaining[0]
        )
        remaining.remove(pick)
        out.append((first, pick))
    return out


_FALLBACK_NODE_BUDGET = 100_000


def _pair_min_rematch(
    order: Sequence[str],
    ratings: Mapping[str, float],
    played: frozenset[frozenset[str]],
) -> list[tuple[str, str]]:
    if len(order) <= _EXACT_FALLBACK_MAX_PLAYERS:
        return _pair_min_cost_exact(order, ratings, played)
    for budget in range(1, len(order)):
        nodes = [_FALLBACK_NODE_BUDGET]
        matches = _pair_with_budget(order, played, budget, nodes)
        if matches is not None:
            return matches
        if nodes[0] <= 0:
            break
    return _pair_first_fit(order, played)


def generate_round(standings: Standings, history: MatchHistory) -> RoundPairing:
    """Pair the field for one round.

    Repeats are avoided whenever any repeat-free perfect matching exists. For
    odd fields the bye goes to the lowest-ranked player whose removal leaves a
    repeat-free matching (lowest-ranked outright if none does). Deterministic
    in (standings, history).
    """
    order = standings.players
    if len(order) < 2:
        raise ArenaTooSmallError(f"need at least 2 players, got {len(order)}")
    played = history.played

    chosen = _choose_round(order, played)
    if chosen is not None:
        matches, bye = chosen
    else:
        # no repeat-free round exists at all: minimize repeats, then rating gap
        ratings = dict(standings.entries)
        if len(order) % 2 == 0:
            bye = None
            matches = _pair_min_rematch(order, ratings, played)
        else:
            bye = order[-1]
            matches = _pair_min_rematch(order[:-1], ratings, played)

    rematch_count = sum(1 for a, b in matches if frozenset((a, b)) in played)
    return RoundPairing(tuple(matches), bye, rematch_count)


def round_robin_schedule(players: Sequence[str]) -> list[RoundPairing]:
    """Circle-method schedule covering every unordered pair exactly once.

    Even n: n-1 rounds, no byes. Odd n: n rounds, one bye per round.
    """
    if len(players) < 2:
        raise ArenaTooSmallError(f"need at least 2 players, got {len(players)}")
    if len(set(players)) != len(players):
        raise DuplicatePlayerError("duplicate player in round-robin field")

    circle: list[str | None] = list(players)
    if len(circle) % 2 == 1:
        circle.append(None)
    n = len(circle)

    rounds: list[RoundPairing] = []
    for _ in range(n - 1):
        matches: list[tuple[str, str]] = []
        bye: str | None = None
        for i in range(n // 2):
            a, b = circle[i], circle[n - 1 - i]
            if a is None:
                bye = b
            elif b is None:
                bye = a
            else:
                matches.append((a, b))
        rounds.append(RoundPairing(tuple(matches), bye, 0))
        circle = [circle[0], circle[-1]] + circle[1:-1]
    return rounds
