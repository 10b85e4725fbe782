"""
Discrete-time Monte Carlo simulator of the event / server / gossip process.

State holds ages, not version counters: per slot, with U_E ~ Bern(p_e),
U_{E,R} ~ Bern(beta) and one Bern(p) draw per directed edge,

    X_R'  = (U_{E,R} ? 0 : X_R) + U_E
    X_j'  = min(X_j, X_R, arrivals) + U_E      subscribers (server feed every slot)
    X_j'  = min(X_j, arrivals) + U_E           non-subscribers

Iterations are simulated side by side as a batch. Randomness comes from
numpy's Philox (counter-based) generator; iterations are grouped in fixed
blocks of `block_size` and block b draws from
SeedSequence(seed, spawn_key=(b,)), so results depend on seed and block size
only, never on how blocks are scheduled across workers.
"""
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import networkx as nx
import numpy as np
from tqdm import tqdm

from gossip_age.core.config import settings
from gossip_age.core.exceptions import ParameterDomainError
from gossip_age.core.logging import logger, log_run_event
from gossip_age.schemas.params import GameParams
from gossip_age.schemas.results import StabilityReport, UserVerdict, Verdict
from gossip_age.schemas.simulation import NodeEstimate, SimConfig, SimMode, SimResult
from gossip_age.schemas.topology import (
    FullyConnected,
    GeneralGraph,
    LinePeriodic,
    SubscriptionProfile,
)
from gossip_age.services.core_model import ac_threshold

_NEVER = np.iinfo(np.int64).max
# a single time-average run is split into this many batch means for its stderr
_BATCH_MEANS = 20


@dataclass
class WorldState:
    """Ages for a batch of independent runs: server (B,) and nodes (B, n)."""

    server_age: np.ndarray
    ages: np.ndarray

    @classmethod
    def initial(cls, batch: int, n: int) -> "WorldState":
        return cls(
            server_age=np.zeros(batch, dtype=np.int64),
            ages=np.zeros((batch, n), dtype=np.int64),
        )


@dataclass(frozen=True)
class Wiring:
    """Directed edges in sorted order plus, per node, the indices of its incoming edges."""

    n: int
    src: np.ndarray
    incoming: np.ndarray
    subscribers: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.src.size)

    @classmethod
    def from_graph(cls, graph: GeneralGraph) -> "Wiring":
        directed = sorted({(u, v) for a, b in graph.edges for u, v in ((a, b), (b, a))})
        src = np.array([u for u, _ in directed], dtype=np.intp)
        sentinel = len(directed)
        inbound: List[List[int]] = [[] for _ in range(graph.n)]
        for index, (_, v) in enumerate(directed):
            inbound[v].append(index)
        width = max([1] + [len(row) for row in inbound])
        incoming = np.full((graph.n, width), sentinel, dtype=np.intp)
        for node, row in enumerate(inbound):
            incoming[node, : len(row)] = row
        subscribers = np.zeros(graph.n, dtype=bool)
        subscribers[list(graph.subscribers)] = True
        return cls(n=graph.n, src=src, incoming=incoming, subscribers=subscribers)


def step(state: WorldState, wiring: Wiring, params: GameParams, rng: np.random.Generator) -> WorldState:
    batch = state.ages.shape[0]
    event = rng.random(batch) < params.p_e
    sample = rng.random(batch) < params.beta
    sends = rng.random((batch, wiring.edge_count)) < params.p

    bump = event.astype(np.int64)
    server = np.where(sample, 0, state.server_age) + bump

    offered = np.full((batch, wiring.edge_count + 1), _NEVER, dtype=np.int64)
    offered[:, :-1] = np.where(sends, state.ages[:, wiring.src], _NEVER)
    best = np.minimum(state.ages, offered[:, wiring.incoming].min(axis=2))
    fed = wiring.subscribers
    best[:, fed] = np.minimum(best[:, fed], state.server_age[:, None])
    return WorldState(server_age=server, ages=best + bump[:, None])


# ---------------------------------------------------------------------------
# Topologies
# ---------------------------------------------------------------------------


def build_line_segment(m: int, cells: int = 1) -> GeneralGraph:
    """
    One inter-subscriber cell 0..m with subscriber endpoints. Subscriber ages
    are driven only by the shared server process, so a single cell reproduces
    the infinite periodic line exactly; cells > 1 closes several cells into a
    ring instead, as a cross-check.
    """
    if m < 1:
        raise ParameterDomainError("m must be ≥ 1")
    if cells < 1:
        raise ParameterDomainError("cells must be ≥ 1")
    if cells == 1:
        graph = nx.path_graph(m + 1)
        subscribers = [0, m]
    else:
        graph = nx.cycle_graph(cells * m)
        subscribers = list(range(0, cells * m, m))
    return GeneralGraph.from_networkx(graph, subscribers, label=f"line m={m} cells={cells}")


def build_fully_connected(n: int, m_sub: int) -> GeneralGraph:
    topology = FullyConnected(n=n, m_sub=m_sub)
    return GeneralGraph.from_networkx(
        nx.complete_graph(n), topology.subscribers, label=f"fc n={n} m={m_sub}"
    )


def as_graph(topology: Union[LinePeriodic, FullyConnected, GeneralGraph]) -> GeneralGraph:
    if isinstance(topology, LinePeriodic):
        return build_line_segment(topology.m)
    if isinstance(topology, FullyConnected):
        return build_fully_connected(topology.n, topology.m_sub)
    return topology


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------


def resolve_burn_in(config: SimConfig, params: GameParams) -> int:
    """
    Ensemble mode discards nothing. Time-average mode uses
    10 * ceil(1 / min(p_e, p, beta)), floored at a tenth of the horizon.
    """
    if config.burn_in is not None:
        return config.burn_in
    if config.mode is SimMode.ENSEMBLE:
        return 0
    rates = [rate for rate in (params.p_e, params.p, params.beta) if rate > 0]
    burn_in = max(10 * math.ceil(1.0 / min(rates)), config.slots // 10)
    return min(burn_in, config.slots - 1)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _run_block(
    block: int,
    batch: int,
    wiring: Wiring,
    params: GameParams,
    config: SimConfig,
    burn_in: int,
    chunks: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Return per-sample node ages (S, n) and server ages (S,) for one block."""
    rng = _block_rng(config.seed, block)
    state = WorldState.initial(batch, wiring.n)
    if config.mode is SimMode.ENSEMBLE:
        for _ in range(config.slots):
            state = step(state, wiring, params, rng)
        return state.ages.astype(float), state.server_age.astype(float)

    window = config.slots - burn_in
    node_sums = np.zeros((chunks, batch, wiring.n), dtype=np.int64)
    server_sums = np.zeros((chunks, batch), dtype=np.int64)
    for t in range(1, config.slots + 1):
        state = step(state, wiring, params, rng)
        if t > burn_in:
            chunk = (t - burn_in - 1) * chunks // window
            node_sums[chunk] += state.ages
            server_sums[chunk] += state.server_age
    lengths = np.bincount(np.arange(window) * chunks // window, minlength=chunks).astype(float)
    nodes = node_sums / lengths[:, None, None]
    server = server_sums / lengths[:, None]
    return nodes.reshape(chunks * batch, wiring.n), server.reshape(chunks * batch)


def _estimate(node: int, samples: np.ndarray) -> NodeEstimate:
    count = int(samples.size)
    stderr = float(samples.std(ddof=1) / math.sqrt(count)) if count > 1 else None
    return NodeEstimate(node=node, mean_age=float(samples.mean()), stderr=stderr, samples=count)


def run(
    topology: Union[LinePeriodic, FullyConnected, GeneralGraph],
    params: GameParams,
    config: SimConfig,
) -> SimResult:
    graph = as_graph(topology)
    wiring = Wiring.from_graph(graph)
    burn_in = resolve_burn_in(config, params)
    chunks = 1
    if config.mode is SimMode.TIME_AVERAGE and config.iterations == 1:
        chunks = min(_BATCH_MEANS, config.slots - burn_in)

    blocks = [
        (index, min(config.block_size, config.iterations - start))
        for index, start in enumerate(range(0, config.iterations, config.block_size))
    ]
    started = time.perf_counter()

    def work(block):
        return _run_block(block[0], block[1], wiring, params, config, burn_in, chunks)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        outcomes = list(
            tqdm(
                pool.map(work, blocks),
                total=len(blocks),
                desc="blocks",
                disable=not config.progress,
            )
        )
    node_samples = np.concatenate([nodes for nodes, _ in outcomes], axis=0)
    server_samples = np.concatenate([server for _, server in outcomes], axis=0)
    wall_time = time.perf_counter() - started

    result = SimResult(
        nodes=[_estimate(i, node_samples[:, i]) for i in range(graph.n)],
        server=_estimate(-1, server_samples),
        subscribers=list(graph.subscribers),
        config=config,
        burn_in=burn_in,
        topology_label=graph.label,
        wall_time=wall_time,
    )
    log_run_event(
        "simulation",
        {
            "topology": graph.label,
            "slots": config.slots,
            "iterations": config.iterations,
            "mode": config.mode.value,
            "workers": config.workers,
            "wall_time_s": round(wall_time, 3),
        },
    )
    return result


# ---------------------------------------------------------------------------
# Empirical stability
# ---------------------------------------------------------------------------


def _margin(estimate: NodeEstimate, z: float) -> float:
    return z * (estimate.stderr or 0.0)


def _nonsubscriber_check(estimate: NodeEstimate, threshold: float, z: float) -> UserVerdict:
    margin = _margin(estimate, z)
    if estimate.mean_age + margin < threshold:
        verdict = Verdict.STABLE_NONSUBSCRIBER
    elif estimate.mean_age - margin >= threshold:
        verdict = Verdict.UNSTABLE
    else:
        verdict = Verdict.INCONCLUSIVE
    return UserVerdict(
        node=estimate.node, subscriber=False, verdict=verdict,
        age=estimate.mean_age, stderr=estimate.stderr,
    )


def _subscriber_check(node: int, alternate: NodeEstimate, threshold: float, z: float) -> UserVerdict:
    margin = _margin(alternate, z)
    if alternate.mean_age - margin >= threshold:
        verdict = Verdict.STABLE_SUBSCRIBER
    elif alternate.mean_age + margin < threshold:
        verdict = Verdict.UNSTABLE
    else:
        verdict = Verdict.INCONCLUSIVE
    return UserVerdict(
        node=node, subscriber=True, verdict=verdict,
        age=alternate.mean_age, stderr=alternate.stderr,
    )


def empirical_stability(
    profile: SubscriptionProfile,
    params: GameParams,
    config: SimConfig,
    z: Optional[float] = None,
) -> StabilityReport:
    """
    AC-stability from simulated means. Verdicts within z standard errors of
    L * x_S are reported as inconclusive. Subscribers are judged from a rerun
    of the alternate profile in which they alone unsubscribe.
    """
    z = settings.Z_THRESHOLD if z is None else z
    threshold = ac_threshold(params)
    topology = profile.topology
    users: List[UserVerdict] = []

    if isinstance(topology, LinePeriodic):
        m = topology.m
        # unsubscribing merges two cells: node 0 becomes the midpoint of a 2m cell
        alternate = run(build_line_segment(2 * m), params, config).nodes[m]
        users.append(_subscriber_check(0, alternate, threshold, z))
        base = run(build_line_segment(m), params, config)
        users.extend(_nonsubscriber_check(base.nodes[i], threshold, z) for i in range(1, m))
    elif isinstance(topology, FullyConnected):
        n, m = topology.n, topology.m_sub
        base = run(build_fully_connected(n, m), params, config)
        users.extend(_nonsubscriber_check(base.nodes[i], threshold, z) for i in range(n - m))
        if m > 0:
            # subscribers are exchangeable; node n - m is the one that drops out
            alternate = run(build_fully_connected(n, m - 1), params, config).nodes[n - m]
            users.extend(_subscriber_check(i, alternate, threshold, z) for i in range(n - m, n))
    else:
        base = run(topology, params, config)
        members = set(topology.subscribers)
        for node in range(topology.n):
            if node in members:
                rerun = run(topology.with_subscribers(members - {node}), params, config)
                users.append(_subscriber_check(node, rerun.nodes[node], threshold, z))
            else:
                users.append(_nonsubscriber_check(base.nodes[node], threshold, z))

    inconclusive = [u.node for u in users if u.verdict is Verdict.INCONCLUSIVE]
    if inconclusive:
        logger.warning(f"inconclusive stability verdicts for nodes {inconclusive}")
    return StabilityReport(threshold=threshold, users=users, source="simulation")
