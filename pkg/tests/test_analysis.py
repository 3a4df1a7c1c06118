import csv
import math
import random

import pytest

from skillarena.aggregation import AggregationPolicy, Choice, Vote, aggregate_votes
from skillarena.analysis import (
    AgreementStats,
    Ranking,
    TauSeries,
    agreement_stats,
    consecutive_taus,
    kendall_tau,
    to_percentiles,
    write_agreement_csv,
    write_percentiles_csv,
    write_tau_series_csv,
)
from skillarena.errors import DomainError


def oracle_tau_b(x, y):
    """Independent O(n^2) pair-enumeration tau-b from integer pair counts."""
    n = len(x)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = (x[i] > x[j]) - (x[i] < x[j])
            dy = (y[i] > y[j]) - (y[i] < y[j])
            if dx * dy > 0:
                concordant += 1
            elif dx * dy < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    n1 = sum(1 for i in range(n) for j in range(i + 1, n) if x[i] == x[j])
    n2 = sum(1 for i in range(n) for j in range(i + 1, n) if y[i] == y[j])
    if n0 == n1 or n0 == n2:
        return 0.0
    return (concordant - discordant) / math.sqrt((n0 - n1) * (n0 - n2))


def ranking_from_list(players, scores):
    return Ranking.from_scores(dict(zip(players, scores)))


def test_identical_rankings():
    r = ranking_from_list("abcd", [4.0, 3.0, 2.0, 1.0])
    assert kendall_tau(r, r) == 1.0


def test_reversed_rankings():
    a = ranking_from_list("abcd", [4.0, 3.0, 2.0, 1.0])
    b = ranking_from_list("abcd", [1.0, 2.0, 3.0, 4.0])
    assert kendall_tau(a, b) == -1.0


def test_adjacent_swap():
    # 6 pairs total, one discordant: tau = (5 - 1) / 6
    a = ranking_from_list("abcd", [4.0, 3.0, 2.0, 1.0])
    b = ranking_from_list("abcd", [4.0, 3.0, 1.0, 2.0])
    assert kendall_tau(a, b) == pytest.approx(4 / 6, abs=1e-12)


def test_tau_symmetry_and_mismatched_sets():
    a = ranking_from_list("abcd", [4.0, 3.0, 2.0, 1.0])
    b = ranking_from_list("abcd", [2.0, 4.0, 1.0, 3.0])
    assert kendall_tau(a, b) == kendall_tau(b, a)
    c = ranking_from_list("abce", [4.0, 3.0, 2.0, 1.0])
    with pytest.raises(DomainError):
        kendall_tau(a, c)


def test_tau_matches_enumeration_oracle():
    rng = random.Random(99)
    players = [f"p{i}" for i in range(10)]
    for trial in range(300):
        n = rng.randint(3, 10)
        ids = players[:n]
        # half the trials use tied (integer, small-range) scores
        if trial % 2 == 0:
            xs = [float(rng.randint(0, 3)) for _ in range(n)]
            ys = [float(rng.randint(0, 3)) for _ in range(n)]
        else:
            xs = rng.sample(range(100), n)
            ys = rng.sample(range(100), n)
        a = ranking_from_list(ids, [float(v) for v in xs])
        b = ranking_from_list(ids, [float(v) for v in ys])
        # the ranking sorts by id internally, so align oracle input by id
        order = sorted(ids)
        ax = [dict(zip(ids, xs))[p] for p in order]
        by = [dict(zip(ids, ys))[p] for p in order]
        assert kendall_tau(a, b) == pytest.approx(oracle_tau_b(ax, by), abs=1e-12)


def test_consecutive_taus():
    r = ranking_from_list("abcd", [4.0, 3.0, 2.0, 1.0])
    series = consecutive_taus([r, r])
    assert series.entries == ((1, 1.0),)
    constant = consecutive_taus([r] * 6)
    assert constant.entries == tuple((i, 1.0) for i in range(1, 6))
    assert constant.final_tau() == 1.0
    with pytest.raises(DomainError):
        consecutive_taus([r])


def test_tau_series_validation():
    with pytest.raises(DomainError):
        TauSeries(((2, 0.5), (1, 0.6)))


def test_percentiles_two_players():
    r = ranking_from_list("ab", [5.0, 1.0])
    assert to_percentiles(r) == {"a": 100.0, "b": 0.0}


def test_percentiles_sixteen():
    players = [f"p{i:02d}" for i in range(16)]
    r = ranking_from_list(players, [float(16 - i) for i in range(16)])
    table = to_percentiles(r)
    assert table["p00"] == 100.0
    assert table["p15"] == 0.0
    assert table["p07"] == pytest.approx(100 * 8 / 15)


def test_percentiles_all_tied():
    r = ranking_from_list("abcd", [1.0, 1.0, 1.0, 1.0])
    table = to_percentiles(r)
    assert all(v == pytest.approx(50.0) for v in table.values())


def test_percentiles_mean_is_fifty_and_monotone():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(2, 20)
        scores = rng.sample(range(1000), n)
        r = ranking_from_list([f"p{i}" for i in range(n)], [float(s) for s in scores])
        table = to_percentiles(r)
        assert sum(table.values()) / n == pytest.approx(50.0)
        by_score = sorted(table, key=lambda p: dict(r.entries)[p])
        for lo, hi in zip(by_score, by_score[1:]):
            assert table[lo] < table[hi]
    with pytest.raises(DomainError):
        to_percentiles(ranking_from_list("a", [1.0]))


def outcome_from_pattern(pattern, left="L", right="R"):
    policy = AggregationPolicy()
    votes = [
        Vote(worker=f"w{i}", left=left, right=right, choice=c, sequence=i)
        for i, c in enumerate(pattern)
    ]
    return aggregate_votes(votes, policy)


def test_agreement_stats_single_outcome():
    out = outcome_from_pattern([Choice.LEFT] * 4 + [Choice.RIGHT])
    stats = agreement_stats([out])
    assert stats.mean_agreement == 0.8
    assert stats.vote_difference_distribution == {3: 1}
    assert stats.agreement_distribution == {0.8: 1}
    assert stats.winner_balance == pytest.approx(1.2)
    assert stats.total_comparisons == 1


def test_winner_balance_extremes():
    all_first = agreement_stats([outcome_from_pattern([Choice.LEFT] * 5)])
    assert all_first.winner_balance == 1.0
    all_second = agreement_stats([outcome_from_pattern([Choice.RIGHT] * 5)])
    assert all_second.winner_balance == 2.0
    split = agreement_stats(
        [
            outcome_from_pattern([Choice.LEFT] * 5),
            outcome_from_pattern([Choice.RIGHT] * 5),
        ]
    )
    assert split.winner_balance == 1.5


def test_agreement_stats_empty():
    with pytest.raises(DomainError):
        agreement_stats([])


def test_csv_writers(tmp_path):
    series = {"arena1": TauSeries(((1, 0.5), (2, 0.75))), "arena2": TauSeries(((1, 0.7),))}
    tau_path = tmp_path / "tau.csv"
    write_tau_series_csv(series, tau_path)
    rows = list(csv.reader(tau_path.open()))
    assert rows[0] == ["arena_id", "round", "tau"]
    assert ["arena1", "1", "0.5"] in rows
    assert ["mean", "1", "0.6"] in rows

    pct_path = tmp_path / "pct.csv"
    write_percentiles_csv({"arena1": {"s1": 100.0, "s2": 0.0}}, pct_path)
    rows = list(csv.reader(pct_path.open()))
    assert rows[0] == ["arena_id", "segment_id", "percentile"]
    assert rows[1] == ["arena1", "s1", "100.0"]

    stats = agreement_stats([outcome_from_pattern([Choice.LEFT] * 4 + [Choice.RIGHT])])
    summary = tmp_path / "agreement.csv"
    dist = tmp_path / "agreement_dist.csv"
    write_agreement_csv({"arena1": stats}, summary, dist)
    rows = list(csv.reader(summary.open()))
    assert rows[0] == ["arena_id", "total_comparisons", "mean_agreement", "winner_balance"]
    rows = list(csv.reader(dist.open()))
    assert rows[0] == ["arena_id", "metric", "value", "count"]
