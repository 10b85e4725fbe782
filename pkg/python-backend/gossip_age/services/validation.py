"""
Analytic-versus-simulation comparison harness.
"""
import math
from typing import Callable, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from gossip_age.core.config import settings
from gossip_age.core.exceptions import AnalyticUnavailable, ComparisonFailed
from gossip_age.schemas.params import GameParams
from gossip_age.schemas.simulation import SimConfig, SimResult
from gossip_age.schemas.topology import FullyConnected, GeneralGraph, LinePeriodic
from gossip_age.services import gossip_sim
from gossip_age.services.core_model import server_age, subscriber_age
from gossip_age.services.fc_analytics import fc_nonsub_age
from gossip_age.services.line_analytics import line_node_ages

AnalyticHook = Callable[[Union[LinePeriodic, FullyConnected], GameParams], np.ndarray]


class ComparisonRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    node: str
    analytic: float
    simulated: float
    stderr: Optional[float]
    z: float
    relative_deviation: float


class Comparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: List[ComparisonRow]
    z_threshold: float
    passed: bool
    simulation: SimResult

    @property
    def worst_z(self) -> float:
        return max(abs(row.z) for row in self.rows)


def analytic_node_ages(topology: Union[LinePeriodic, FullyConnected], params: GameParams) -> np.ndarray:
    """Expected age of every simulated node, in simulator node order."""
    if isinstance(topology, LinePeriodic):
        return line_node_ages(topology.m, params)
    if isinstance(topology, FullyConnected):
        ages = np.full(topology.n, subscriber_age(params))
        if topology.m_sub < topology.n:
            ages[: topology.n - topology.m_sub] = fc_nonsub_age(topology.n, topology.m_sub, params)
        return ages
    raise AnalyticUnavailable("no analytical ages for general graphs; use simulation")


def _row(label: str, analytic: float, simulated: float, stderr: Optional[float]) -> ComparisonRow:
    gap = simulated - analytic
    if stderr:
        z = gap / stderr
    else:
        z = 0.0 if gap == 0 else math.copysign(math.inf, gap)
    relative = abs(gap) / analytic if analytic else abs(gap)
    return ComparisonRow(
        node=label, analytic=analytic, simulated=simulated,
        stderr=stderr, z=z, relative_deviation=relative,
    )


def compare(
    topology: Union[LinePeriodic, FullyConnected],
    params: GameParams,
    config: SimConfig,
    z_threshold: Optional[float] = None,
    analytic: AnalyticHook = analytic_node_ages,
) -> Comparison:
    """Simulate the topology and z-score every node (and the server) against the analytics."""
    if isinstance(topology, GeneralGraph):
        raise AnalyticUnavailable("no analytical ages for general graphs; use simulation")
    z_threshold = settings.Z_THRESHOLD if z_threshold is None else z_threshold
    expected = analytic(topology, params)
    simulation = gossip_sim.run(topology, params, config)
    rows = [_row("server", server_age(params), simulation.server.mean_age, simulation.server.stderr)]
    rows.extend(
        _row(str(estimate.node), float(expected[estimate.node]), estimate.mean_age, estimate.stderr)
        for estimate in simulation.nodes
    )
    passed = all(abs(row.z) <= z_threshold for row in rows)
    return Comparison(rows=rows, z_threshold=z_threshold, passed=passed, simulation=simulation)


def assert_agreement(comparison: Comparison) -> None:
    if not comparison.passed:
        worst = max(comparison.rows, key=lambda row: abs(row.z))
        raise ComparisonFailed(
            f"node {worst.node}: |z| = {abs(worst.z):.2f} exceeds {comparison.z_threshold}",
            worst_z=abs(worst.z),
        )
