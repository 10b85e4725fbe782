from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class EquilibriumMode(str, Enum):
    SERVER_PREFERRED = "server-preferred"
    WORST_CASE = "worst-case"


class BetaKind(str, Enum):
    RATE = "rate"
    LIMIT_ZERO = "limit-zero"
    INFEASIBLE = "infeasible"


class BetaStar(BaseModel):
    """
    Minimum sampling rate sustaining a subscription level.

    `value` is only meaningful for RATE; LIMIT_ZERO stands for beta* -> 0 and
    is charged c(0), it is never fed into an age formula.
    """

    model_config = ConfigDict(frozen=True)

    kind: BetaKind
    value: Optional[float] = None

    @classmethod
    def rate(cls, value: float) -> "BetaStar":
        return cls(kind=BetaKind.RATE, value=value)

    @classmethod
    def limit_zero(cls) -> "BetaStar":
        return cls(kind=BetaKind.LIMIT_ZERO, value=0.0)

    @classmethod
    def infeasible(cls) -> "BetaStar":
        return cls(kind=BetaKind.INFEASIBLE)

    @property
    def feasible(self) -> bool:
        return self.kind is not BetaKind.INFEASIBLE

    @property
    def cost_argument(self) -> float:
        if not self.feasible:
            raise ValueError("infeasible sampling rate has no cost")
        return self.value if self.kind is BetaKind.RATE else 0.0


class AuditEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int
    beta_star: BetaStar
    subscriber_fraction: float
    cost: Optional[float] = None
    utility: Optional[float] = None


class EquilibriumResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    topology: Literal["line", "fc"]
    mode: EquilibriumMode
    # period (line) or subscriber count (fc); None for the no-subscription outcome
    m: Optional[int]
    n: Optional[int] = None
    beta_star: float = Field(..., ge=0.0, le=1.0)
    beta_limit_zero: bool = False
    subscriber_fraction: float
    cost: float
    utility: float
    feasible: bool
    audit: List[AuditEntry]

    @model_validator(mode="after")
    def _utility_consistent(self) -> "EquilibriumResult":
        if abs(self.utility - (self.subscriber_fraction - self.cost)) > 1e-12:
            raise ValueError("utility must equal F_S - c(beta*)")
        return self


class Verdict(str, Enum):
    STABLE_NONSUBSCRIBER = "stable-nonsubscriber"
    STABLE_SUBSCRIBER = "stable-subscriber"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


class UserVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: int
    subscriber: bool
    verdict: Verdict
    # age used for the verdict: own age (non-subscriber) or alternate unsubscribe age
    age: float
    stderr: Optional[float] = None


class StabilityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    threshold: float
    users: List[UserVerdict]
    source: Literal["analytic", "simulation"] = "analytic"

    @property
    def all_stable(self) -> bool:
        return all(
            u.verdict in (Verdict.STABLE_NONSUBSCRIBER, Verdict.STABLE_SUBSCRIBER)
            for u in self.users
        )

    def verdict_of(self, node: int) -> Verdict:
        for user in self.users:
            if user.node == node:
                return user.verdict
        raise KeyError(node)
