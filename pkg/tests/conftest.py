import numpy as np
import pytest

from equilires.graph import Graph


@pytest.fixture
def path3() -> Graph:
    """Undirected path 0-1-2 with unit weights."""
    adj = np.zeros((3, 3))
    adj[0, 1] = adj[1, 0] = 1.0
    adj[1, 2] = adj[2, 1] = 1.0
    return Graph(adj)


@pytest.fixture
def k3() -> Graph:
    """Undirected triangle with unit weights."""
    adj = np.ones((3, 3)) - np.eye(3)
    return Graph(adj)


@pytest.fixture
def star4() -> Graph:
    """Star with center 0 and leaves 1..3."""
    adj = np.zeros((4, 4))
    for leaf in (1, 2, 3):
        adj[0, leaf] = adj[leaf, 0] = 1.0
    return Graph(adj)


def edgeless(n: int) -> Graph:
    return Graph(np.zeros((n, n)))
