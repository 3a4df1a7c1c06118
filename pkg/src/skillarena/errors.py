"""Exception hierarchy. Every error carries a stable machine-readable code."""

from __future__ import annotations

from typing import Any


class SkillArenaError(Exception):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message: str, **detail: Any):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.detail:
            out["detail"] = self.detail
        return out


class NonFiniteRatingError(SkillArenaError):
    code = "non_finite_rating"


class UnknownPlayerError(SkillArenaError):
    code = "unknown_player"


class DuplicatePlayerError(SkillArenaError):
    code = "duplicate_player"


class ArenaTooSmallError(SkillArenaError):
    code = "arena_too_small"


class DomainError(SkillArenaError):
    code = "domain_error"


class InconsistentBatchError(SkillArenaError):
    code = "inconsistent_batch"


class IncompleteBatchError(SkillArenaError):
    code = "incomplete_batch"


class QualificationPendingError(SkillArenaError):
    """Worker has not seen enough gold pairs to be assessed either way."""

    code = "qualification_pending"


class ConfigurationError(SkillArenaError):
    code = "configuration_error"


class DataIntegrityError(SkillArenaError):
    code = "data_integrity"


class UnknownPairError(SkillArenaError):
    code = "unknown_pair"


class UnqualifiedWorkerError(SkillArenaError):
    code = "worker_unqualified"


class DuplicateVoteError(SkillArenaError):
    code = "duplicate_vote"


class RoundStateError(SkillArenaError):
    code = "round_state"


class SplitInfeasibleError(SkillArenaError):
    code = "split_infeasible"


class ReplayError(SkillArenaError):
    code = "replay_error"

    def __init__(self, message: str, seq: int | None = None, **detail: Any):
        super().__init__(message, **detail)
        self.seq = seq

    def to_dict(self) -> dict[str, Any]:
        out = super().to_dict()
        if self.seq is not None:
            out["seq"] = self.seq
        return out


class UnknownTicketError(SkillArenaError):
    code = "unknown_ticket"


class TicketExpiredError(SkillArenaError):
    code = "ticket_expired"
