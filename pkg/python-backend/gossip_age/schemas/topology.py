from typing import Annotated, List, Literal, Optional, Tuple, Union

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator


class LinePeriodic(BaseModel):
    """Infinite two-way line with subscribers at every multiple of m."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["line"] = "line"
    m: int = Field(..., ge=1)

    @property
    def subscriber_fraction(self) -> float:
        return 1.0 / self.m


class FullyConnected(BaseModel):
    """n users, all pairs connected; the last m_sub users subscribe."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["fc"] = "fc"
    n: int = Field(..., ge=1)
    m_sub: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _check_count(self) -> "FullyConnected":
        if self.m_sub > self.n:
            raise ValueError(f"m_sub={self.m_sub} exceeds n={self.n}")
        return self

    @property
    def subscribers(self) -> List[int]:
        return list(range(self.n - self.m_sub, self.n))

    @property
    def subscriber_fraction(self) -> float:
        return self.m_sub / self.n


class GeneralGraph(BaseModel):
    """Arbitrary undirected gossip graph with an explicit subscriber set."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["graph"] = "graph"
    n: int = Field(..., ge=1)
    edges: Tuple[Tuple[int, int], ...]
    subscribers: Tuple[int, ...] = ()
    # label kept for provenance, e.g. "segment m=7 cells=1"
    label: Optional[str] = None

    @model_validator(mode="after")
    def _check_graph(self) -> "GeneralGraph":
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
        for s in self.subscribers:
            if not 0 <= s < self.n:
                raise ValueError(f"subscriber {s} outside 0..{self.n - 1}")
        return self

    @classmethod
    def from_networkx(
        cls, graph: nx.Graph, subscribers, label: Optional[str] = None
    ) -> "GeneralGraph":
        nodes = sorted(graph.nodes)
        if nodes != list(range(len(nodes))):
            graph = nx.convert_node_labels_to_integers(graph, ordering="sorted")
        edges = sorted({(min(u, v), max(u, v)) for u, v in graph.edges})
        return cls(
            n=graph.number_of_nodes(),
            edges=tuple(edges),
            subscribers=tuple(sorted(set(subscribers))),
            label=label,
        )

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def with_subscribers(self, subscribers) -> "GeneralGraph":
        return GeneralGraph(
            n=self.n,
            edges=self.edges,
            subscribers=tuple(sorted(set(subscribers))),
            label=self.label,
        )

    @property
    def subscriber_fraction(self) -> float:
        return len(self.subscribers) / self.n


Topology = Annotated[
    Union[LinePeriodic, FullyConnected, GeneralGraph], Field(discriminator="kind")
]


class SubscriptionProfile(BaseModel):
    """Action vector a_i carried by a topology."""

    model_config = ConfigDict(frozen=True)

    topology: Topology

    @property
    def actions(self) -> List[int]:
        """
        Per-user subscribe indicators. For the periodic line, one period
        0..m-1 is reported (node 0 subscribes).
        """
        topo = self.topology
        if isinstance(topo, LinePeriodic):
            return [1 if i == 0 else 0 for i in range(topo.m)]
        if isinstance(topo, FullyConnected):
            return [1 if i >= topo.n - topo.m_sub else 0 for i in range(topo.n)]
        members = set(topo.subscribers)
        return [1 if i in members else 0 for i in range(topo.n)]

    @property
    def subscriber_fraction(self) -> float:
        return self.topology.subscriber_fraction
