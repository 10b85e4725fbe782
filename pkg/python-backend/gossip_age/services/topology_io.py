"""
Plain-text gossip graphs.

    # comment
    nodes 6                 (optional; defaults to the largest index + 1)
    0 1                     one undirected edge per line
    1 2
    subscribers: 0 3        subscriber set, space or comma separated
"""
import pathlib
from typing import List, Set, Tuple

import networkx as nx

from gossip_age.core.exceptions import ParameterDomainError
from gossip_age.schemas.topology import GeneralGraph


def parse_graph(text: str, label: str = None) -> GeneralGraph:
    edges: List[Tuple[int, int]] = []
    subscribers: Set[int] = set()
    declared = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.lower().startswith("subscribers"):
                body = line.split(":", 1)[1] if ":" in line else line[len("subscribers"):]
                subscribers.update(int(tok) for tok in body.replace(",", " ").split())
            elif line.lower().startswith("nodes"):
                declared = int(line.split()[1])
            else:
                u, v = (int(tok) for tok in line.split())
                edges.append((u, v))
        except ValueError:
            raise ParameterDomainError(f"line {number}: cannot parse {raw.strip()!r}")
    indices = [i for edge in edges for i in edge] + list(subscribers)
    n = declared if declared is not None else (max(indices) + 1 if indices else 0)
    if n < 1:
        raise ParameterDomainError("graph file declares no nodes")

    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for u, v in edges:
        if u == v:
            raise ParameterDomainError(f"self-loop at node {u}")
        graph.add_edge(u, v)
    if graph.number_of_nodes() != n:
        raise ParameterDomainError(f"edge endpoints exceed the declared {n} nodes")
    return GeneralGraph.from_networkx(graph, subscribers, label=label)


def load_graph(path: str) -> GeneralGraph:
    source = pathlib.Path(path)
    return parse_graph(source.read_text(encoding="utf-8"), label=source.name)
