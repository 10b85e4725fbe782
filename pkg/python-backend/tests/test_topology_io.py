import pytest

from gossip_age.core.exceptions import ParameterDomainError
from gossip_age.services.topology_io import load_graph, parse_graph

RING = """
# four users on a ring, user 0 subscribes
0 1
1 2
2 3
3 0
subscribers: 0
"""


def test_parse_ring():
    graph = parse_graph(RING, label="ring")
    assert graph.n == 4
    assert graph.edges == ((0, 1), (0, 3), (1, 2), (2, 3))
    assert graph.subscribers == (0,)
    assert graph.label == "ring"


def test_declared_nodes_and_comma_separated_subscribers():
    graph = parse_graph("nodes 5\n0 1\nsubscribers: 0, 4\n")
    assert graph.n == 5
    assert graph.subscribers == (0, 4)
    assert graph.to_networkx().number_of_nodes() == 5


def test_duplicate_edges_collapse():
    graph = parse_graph("0 1\n1 0\n")
    assert graph.edges == ((0, 1),)


@pytest.mark.parametrize(
    "text",
    [
        "0 0\n",
        "0 1 2\n",
        "a b\n",
        "nodes 2\n0 5\n",
        "# nothing here\n",
    ],
)
def test_malformed_graphs(text):
    with pytest.raises(ParameterDomainError):
        parse_graph(text)


def test_load_graph(tmp_path):
    path = tmp_path / "ring.txt"
    path.write_text(RING, encoding="utf-8")
    graph = load_graph(str(path))
    assert graph.label == "ring.txt"
    assert graph.n == 4
