"""Turn raw worker votes into match outcomes, and police worker quality.

A pair is judged by a fixed number of independent workers (default 5) and
resolved by majority. Low-agreement batches (a 3-2 split under the defaults)
escalate to three extra workers; a tie after escalation is a draw. Workers
qualify by platform approval history plus accuracy on gold-standard pairs,
which are also injected between real tasks for ongoing monitoring.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence, TypeVar

from .errors import (
    ConfigurationError,
    DataIntegrityError,
    DomainError,
    IncompleteBatchError,
    InconsistentBatchError,
    QualificationPendingError,
)
from .ratings import Outcome


class Choice(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    NO_DIFFERENCE = "no_difference"

    def flipped(self) -> "Choice":
        if self is Choice.LEFT:
            return Choice.RIGHT
        if self is Choice.RIGHT:
            return Choice.LEFT
        return Choice.NO_DIFFERENCE


@dataclass(frozen=True)
class Vote:
    """One worker's judgment of a pair shown in a fixed left/right order."""

    worker: str
    left: str
    right: str
    choice: Choice
    is_gold: bool = False
    sequence: int = 0

    def __post_init__(self) -> None:
        if not self.worker:
            raise DomainError("worker id must be non-empty")
        if self.left == self.right:
            raise DomainError(f"vote pairs segment {self.left!r} with itself")

    @property
    def pair(self) -> frozenset[str]:
        return frozenset((self.left, self.right))

    @property
    def chosen_player(self) -> str | None:
        if self.choice is Choice.LEFT:
            return self.left
        if self.choice is Choice.RIGHT:
            return self.right
        return None

    def mirrored(self) -> "Vote":
        return replace(self, left=self.right, right=self.left, choice=self.choice.flipped())


@dataclass(frozen=True)
class AggregationPolicy:
    votes_initial: int = 5
    votes_escalation: int = 3
    escalation_threshold: float = 0.8
    approval_threshold: float = 0.90
    gold_threshold: float = 0.8
    min_gold: int = 5
    allow_no_difference: bool = False

    def __post_init__(self) -> None:
        if self.votes_initial < 1 or self.votes_escalation < 0:
            raise ConfigurationError("vote counts must be positive")
        if not 0.5 <= self.escalation_threshold <= 1.0:
            raise ConfigurationError("escalation threshold must lie in [0.5, 1]")

    @property
    def votes_full(self) -> int:
        return self.votes_initial + self.votes_escalation


@dataclass(frozen=True)
class AggregatedOutcome:
    """Majority-resolved result of one pair, with agreement metadata."""

    left: str
    right: str
    outcome: Outcome
    vote_count: int
    agreement_rate: float
    vote_difference: float
    escalated: bool

    @property
    def pair(self) -> frozenset[str]:
        return frozenset((self.left, self.right))

    @property
    def winner(self) -> str | None:
        if self.outcome is Outcome.FIRST_WINS:
            return self.left
        if self.outcome is Outcome.SECOND_WINS:
            return self.right
        return None


def _tally(votes: Sequence[Vote], policy: AggregationPolicy) -> tuple[float, float]:
    votes_left = 0.0
    votes_right = 0.0
    for vote in votes:
        if vote.choice is Choice.NO_DIFFERENCE:
            if not policy.allow_no_difference:
                raise DomainError("no-difference votes are disabled by policy")
            votes_left += 0.5
            votes_right += 0.5
        elif vote.choice is Choice.LEFT:
            votes_left += 1.0
        else:
            votes_right += 1.0
    return votes_left, votes_right


def _check_batch(votes: Sequence[Vote], policy: AggregationPolicy, expected: set[int]) -> None:
    if not votes:
        raise IncompleteBatchError("empty vote batch")
    presented = {(v.left, v.right) for v in votes}
    if len(presented) > 1:
        raise InconsistentBatchError(f"votes mix pairs/presentations: {sorted(presented)}")
    workers = [v.worker for v in votes]
    if len(set(workers)) != len(workers):
        raise InconsistentBatchError("batch contains two votes by one worker")
    if len(votes) not in expected:
        raise IncompleteBatchError(
            f"batch has {len(votes)} votes, expected one of {sorted(expected)}"
        )


def aggregate_votes(votes: Sequence[Vote], policy: AggregationPolicy) -> AggregatedOutcome:
    """Resolve a complete batch of votes for one pair by majority."""
    _check_batch(votes, policy, {policy.votes_initial, policy.votes_full})
    votes_left, votes_right = _tally(votes, policy)
    if votes_left > votes_right:
        outcome = Outcome.FIRST_WINS
    elif votes_right > votes_left:
        outcome = Outcome.SECOND_WINS
    else:
        outcome = Outcome.DRAW
    count = len(votes)
    return AggregatedOutcome(
        left=votes[0].left,
        right=votes[0].right,
        outcome=outcome,
        vote_count=count,
        agreement_rate=max(votes_left, votes_right) / count,
        vote_difference=abs(votes_left - votes_right),
        escalated=count == policy.votes_full,
    )


def needs_escalation(votes: Sequence[Vote], policy: AggregationPolicy) -> bool:
    """True when the initial batch's agreement falls below the policy threshold."""
    _check_batch(votes, policy, {policy.votes_initial})
    votes_left, votes_right = _tally(votes, policy)
    agreement = max(votes_left, votes_right) / len(votes)
    return agreement < policy.escalation_threshold


@dataclass(frozen=True)
class WorkerRecord:
    worker: str
    approval_rate: float
    gold_correct: int = 0
    gold_seen: int = 0
    qualified: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.approval_rate <= 1.0:
            raise DomainError(f"approval rate must lie in [0, 1], got {self.approval_rate}")
        if self.gold_correct > self.gold_seen or self.gold_correct < 0:
            raise DomainError("gold_correct must lie in [0, gold_seen]")


def qualify_worker(record: WorkerRecord, policy: AggregationPolicy) -> WorkerRecord:
    """Re-derive the qualified flag from approval history and gold accuracy.

    Raises QualificationPendingError while the worker has seen fewer than
    ``policy.min_gold`` golds: not yet assessable, which is distinct from
    disqualified.
    """
    if record.gold_seen < policy.min_gold:
        raise QualificationPendingError(
            f"worker {record.worker!r} has seen {record.gold_seen} of "
            f"{policy.min_gold} required gold pairs",
            worker=record.worker,
            gold_seen=record.gold_seen,
            min_gold=policy.min_gold,
        )
    qualified = (
        record.approval_rate > policy.approval_threshold
        and record.gold_correct / record.gold_seen >= policy.gold_threshold
    )
    return replace(record, qualified=qualified)


@dataclass(frozen=True)
class GoldDeltas:
    gold_seen: int
    gold_correct: int


def score_worker_on_golds(
    votes: Iterable[Vote], gold_answers: Mapping[frozenset[str], str]
) -> GoldDeltas:
    """Score a worker's gold votes against the known answers.

    Non-gold votes are ignored; a gold vote whose pair is missing from
    ``gold_answers`` is a data-integrity error.
    """
    seen = 0
    correct = 0
    for vote in votes:
        if not vote.is_gold:
            continue
        if vote.pair not in gold_answers:
            raise DataIntegrityError(
                f"gold vote references unknown pair {sorted(vote.pair)}",
                pair=sorted(vote.pair),
            )
        seen += 1
        if vote.chosen_player == gold_answers[vote.pair]:
            correct += 1
    return GoldDeltas(gold_seen=seen, gold_correct=correct)


def apply_gold_deltas(record: WorkerRecord, deltas: GoldDeltas) -> WorkerRecord:
    return replace(
        record,
        gold_seen=record.gold_seen + deltas.gold_seen,
        gold_correct=record.gold_correct + deltas.gold_correct,
    )


T = TypeVar("T")


@dataclass(frozen=True)
class InjectedTask:
    """One slot in an augmented task list; is_gold stays server-side."""

    item: object
    is_gold: bool


def inject_gold(
    task_pairs: Sequence[T],
    gold_pool: Sequence[T],
    rate: float,
    seed: int,
) -> list[InjectedTask]:
    """Insert gold tasks between real ones, one per real task with probability `rate`.

    Deterministic under `seed`; golds are drawn from the pool without
    replacement, reshuffling once exhausted.
    """
    if not 0.0 <= rate <= 1.0:
        raise ConfigurationError(f"gold rate must lie in [0, 1], got {rate}")
    if rate > 0 and not gold_pool:
        raise ConfigurationError("positive gold rate requires a non-empty gold pool")

    rng = random.Random(seed)
    remaining: list[T] = []
    out: list[InjectedTask] = []
    for item in task_pairs:
        out.append(InjectedTask(item, is_gold=False))
        if rate > 0 and rng.random() < rate:
            if not remaining:
                remaining = list(gold_pool)
                rng.shuffle(remaining)
            out.append(InjectedTask(remaining.pop(), is_gold=True))
    return out
