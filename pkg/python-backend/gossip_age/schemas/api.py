from typing import List, Optional

from pydantic import BaseModel, Field

from gossip_age.core.config import settings
from gossip_age.schemas.params import CostModel, GameParams
from gossip_age.schemas.results import EquilibriumMode
from gossip_age.schemas.topology import SubscriptionProfile


# Request bodies
class LineAgesRequest(BaseModel):
    m: int = Field(..., ge=1)
    params: GameParams


class FcAgesRequest(BaseModel):
    n: int = Field(..., ge=1)
    m_sub: int = Field(..., ge=0)
    params: GameParams


class LineEquilibriumRequest(BaseModel):
    p: float = Field(..., gt=0.0, le=1.0)
    L: float = Field(..., gt=1.0)
    p_e: float = Field(..., ge=0.0, le=1.0)
    cost: CostModel = CostModel()
    mode: EquilibriumMode = EquilibriumMode.SERVER_PREFERRED


class FcEquilibriumRequest(LineEquilibriumRequest):
    n: int = Field(..., ge=1, le=settings.FC_MAX_USERS)


class StabilityRequest(BaseModel):
    profile: SubscriptionProfile
    params: GameParams


# Responses
class LineAgesResponse(BaseModel):
    m: int
    node_ages: List[float]
    server_age: float
    subscriber_age: float
    threshold: float


class FcAgesResponse(BaseModel):
    n: int
    m_sub: int
    # x_[1,k] for k = 1..n-m_sub; null entries stand for an unbounded age (no subscribers)
    set_ages: List[Optional[float]]
    nonsubscriber_age: Optional[float] = None
    server_age: float
    subscriber_age: float
    threshold: float
