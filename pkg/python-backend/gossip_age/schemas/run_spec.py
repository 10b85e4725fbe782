from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from gossip_age import __version__
from gossip_age.schemas.params import CostModel, GameParams
from gossip_age.schemas.results import EquilibriumMode
from gossip_age.schemas.simulation import SimConfig


class RunSpec(BaseModel):
    """Fully validated description of one CLI run, echoed into its output."""

    model_config = ConfigDict(frozen=True)

    command: Literal["ages", "equilibrium", "compare", "sweep", "simulate"]
    topology: Literal["line", "fc", "graph"]
    m: Optional[int] = Field(None, ge=0)
    n: Optional[int] = Field(None, ge=1)
    cells: int = Field(1, ge=1)
    graph: Optional[str] = None
    params: GameParams
    cost: CostModel = CostModel()
    mode: EquilibriumMode = EquilibriumMode.SERVER_PREFERRED
    sim: Optional[SimConfig] = None
    simulate: bool = False
    stability: bool = False
    z_threshold: float = Field(3.0, gt=0.0)
    over: Optional[Literal["m", "beta"]] = None
    range: Optional[str] = None
    output: Literal["table", "json", "csv"] = "table"
    csv_path: Optional[str] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "RunSpec":
        if self.topology == "graph" and self.command not in ("simulate",):
            raise ValueError("general graphs are only supported by `simulate`")
        if self.topology == "graph" and not self.graph:
            raise ValueError("--graph FILE is required for general graphs")
        needs_m = self.command in ("ages", "compare", "simulate") and self.topology != "graph"
        if needs_m and self.m is None:
            raise ValueError("--m is required")
        if self.topology == "line" and needs_m and self.m < 1:
            raise ValueError("m must be ≥ 1")
        if self.topology == "fc" and self.n is None:
            raise ValueError("--n is required for fully-connected networks")
        if self.topology == "fc" and self.m is not None and self.n is not None and self.m > self.n:
            raise ValueError(f"m={self.m} exceeds n={self.n}")
        if self.command == "sweep" and (self.over is None or self.range is None):
            raise ValueError("sweep needs --over and --range")
        if self.output == "csv" and not self.csv_path:
            raise ValueError("csv output needs a path")
        return self


class RunOutput(BaseModel):
    """Envelope of every JSON document the CLI emits."""

    tool: str = "gossip-age"
    version: str = __version__
    run_spec: RunSpec
    result: Dict[str, Any]
