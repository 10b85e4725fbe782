from pydantic import BaseModel, ConfigDict, Field, field_validator


class GameParams(BaseModel):
    """Per-slot probabilities of the event/server/gossip process plus the age tolerance."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    # p_e = 0 is accepted as the degenerate no-update process (all ages 0)
    p_e: float = Field(..., ge=0.0, le=1.0, description="event update probability per slot")
    p: float = Field(..., gt=0.0, le=1.0, description="gossip probability per directed edge per slot")
    beta: float = Field(..., gt=0.0, le=1.0, description="server sampling probability per slot")
    L: float = Field(..., gt=1.0, description="age tolerance multiplier")

    @property
    def threshold_factor(self) -> float:
        """(L - 1)(1/beta + 1), the geometry-factor level at the AC boundary."""
        return (self.L - 1.0) * (1.0 / self.beta + 1.0)

    def with_beta(self, beta: float) -> "GameParams":
        return GameParams(p_e=self.p_e, p=self.p, beta=beta, L=self.L)


class CostModel(BaseModel):
    """Monomial sampling cost c(beta) = a * beta ** q."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(80.0, ge=0.0)
    q: float = Field(2.0, gt=0.0)

    @field_validator("a", "q")
    @classmethod
    def _finite(cls, value: float) -> float:
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("cost coefficients must be finite")
        return value

    def __call__(self, beta: float) -> float:
        if beta <= 0.0:
            return 0.0
        return self.a * beta ** self.q
