"""The record every inequality checker emits."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

RTOL = 1e-9
ATOL = 1e-12

THEOREM_IDS = (
    "Bennett",
    "HoldThm",
    "AbsCont",
    "Lp",
    "GBeta",
    "TildeLogInv",
    "TildeLogNonInv",
    "LogInterp13",
    "AbsFirst",
    "AbsHigher",
)


def holds(lhs: float, rhs: float, rtol: float = RTOL, atol: float = ATOL) -> bool:
    """Floating-point acceptance of ``lhs <= rhs``."""
    return lhs <= rhs * (1.0 + rtol) + atol


def slack_ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return 0.0 if lhs == 0.0 else math.inf
    return lhs / rhs


@dataclass(frozen=True)
class InequalityReport:
    theorem_id: str
    params: dict
    lhs: float
    rhs: float
    slack_ratio: float
    passed: bool
    instance_digest: dict = field(default_factory=dict)

    @classmethod
    def build(cls, theorem_id, lhs, rhs, params=None, digest=None,
              rtol=RTOL, atol=ATOL) -> InequalityReport:
        if theorem_id not in THEOREM_IDS:
            raise ValueError(f"unknown theorem id {theorem_id!r}")
        lhs, rhs = float(lhs), float(rhs)
        return cls(
            theorem_id=theorem_id,
            params=dict(params or {}),
            lhs=lhs,
            rhs=rhs,
            slack_ratio=slack_ratio(lhs, rhs),
            passed=holds(lhs, rhs, rtol, atol),
            instance_digest=dict(digest or {}),
        )

    def with_digest(self, digest: dict) -> InequalityReport:
        return InequalityReport(
            self.theorem_id, self.params, self.lhs, self.rhs,
            self.slack_ratio, self.passed, dict(digest),
        )

    def rejudge(self, rtol: float = RTOL, atol: float = ATOL) -> InequalityReport:
        """Same comparison under different floating-point tolerances."""
        return InequalityReport(
            self.theorem_id, self.params, self.lhs, self.rhs,
            self.slack_ratio, holds(self.lhs, self.rhs, rtol, atol),
            self.instance_digest,
        )

    def to_dict(self) -> dict:
        return asdict(self)
