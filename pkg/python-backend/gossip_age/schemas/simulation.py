from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from gossip_age.core.config import settings


class SimMode(str, Enum):
    ENSEMBLE = "ensemble"
    TIME_AVERAGE = "time-average"


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    slots: int = Field(default_factory=lambda: settings.SIM_SLOTS, ge=1)
    iterations: int = Field(default_factory=lambda: settings.SIM_ITERATIONS, ge=1)
    # None resolves per run from the probabilities (time-average mode only)
    burn_in: Optional[int] = Field(None, ge=0)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2**64)
    mode: SimMode = SimMode.TIME_AVERAGE
    # iterations sharing one RNG stream; part of the reproducibility contract
    block_size: int = Field(default_factory=lambda: settings.SIM_BLOCK_SIZE, ge=1)
    # execution-only knobs, excluded from serialized output
    workers: int = Field(default_factory=lambda: settings.SIM_WORKERS, ge=1, exclude=True)
    progress: bool = Field(False, exclude=True)

    @model_validator(mode="after")
    def _check_window(self) -> "SimConfig":
        if self.burn_in is not None and self.burn_in >= self.slots:
            raise ValueError(f"burn_in={self.burn_in} must be below slots={self.slots}")
        return self

    @classmethod
    def full_scale(cls, seed: Optional[int] = None, workers: int = 1) -> "SimConfig":
        return cls(
            slots=settings.FULL_SLOTS,
            iterations=settings.FULL_ITERATIONS,
            mode=SimMode.ENSEMBLE,
            seed=settings.DEFAULT_SEED if seed is None else seed,
            workers=workers,
        )


class NodeEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: int
    mean_age: float
    # None when a single sample is available
    stderr: Optional[float] = None
    samples: int


class SimResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    nodes: List[NodeEstimate]
    server: NodeEstimate
    subscribers: List[int]
    config: SimConfig
    burn_in: int
    topology_label: Optional[str] = None
    # wall time is logged and kept in memory but never serialized
    wall_time: float = Field(0.0, exclude=True)

    def mean(self, node: int) -> float:
        return self.nodes[node].mean_age

    def stderr(self, node: int) -> float:
        return self.nodes[node].stderr
