"""Canonical graph representation, edge-list I/O, and degree statistics."""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .errors import InputError


@dataclasses.dataclass(frozen=True)
class Graph:
    """Square nonnegative weighted adjacency with optional node labels.

    ``adjacency[u, v]`` is the weight of the edge u -> v; undirected
    graphs store both directions and must be exactly symmetric.  The
    diagonal is zero (self-loops are rejected at construction).  Instances
    are immutable after construction and safe to share across threads.
    """

    adjacency: np.ndarray
    directed: bool = False
    labels: np.ndarray | None = None

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InputError(f"adjacency must be square, got shape {adj.shape}")
        if not np.all(np.isfinite(adj)):
            raise InputError("adjacency contains non-finite entries")
        if adj.size and adj.min() < 0:
            raise InputError("adjacency contains negative weights")
        if np.any(np.diagonal(adj) != 0):
            raise InputError("self-loops are not allowed")
        if not self.directed and not np.array_equal(adj, adj.T):
            raise InputError("undirected graph requires a symmetric adjacency")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=int)
            if lab.shape != (adj.shape[0],):
                raise InputError(
                    f"labels must have length {adj.shape[0]}, got {lab.shape}"
                )
            if lab.size and lab.min() < 0:
                raise InputError("labels must be non-negative integers")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def with_adjacency(self, adjacency: np.ndarray) -> "Graph":
        """New Graph with the same flags and labels but a new matrix."""
        return Graph(adjacency, directed=self.directed, labels=self.labels)


@dataclasses.dataclass(frozen=True)
class DegreeProfile:
    """Weighted in/out degrees and degree centrality of every node.

    ``in_deg[i]`` sums column i of the adjacency, ``out_deg[i]`` sums
    row i, and ``centrality = (in_deg + out_deg) / (n - 1)``.
    """

    in_deg: np.ndarray
    out_deg: np.ndarray
    centrality: np.ndarray


def degree_profile(g: Graph) -> DegreeProfile:
    if g.n < 2:
        raise InputError("degree centrality needs at least 2 nodes")
    in_deg = g.adjacency.sum(axis=0)
    out_deg = g.adjacency.sum(axis=1)
    centrality = (in_deg + out_deg) / (g.n - 1)
    return DegreeProfile(in_deg=in_deg, out_deg=out_deg, centrality=centrality)


def _parse_edge_lines(path) -> tuple[dict[tuple[int, int], float], int]:
    """Parse an edge-list file into {(u, v): w} with duplicates overwriting.

    Returns the arc dictionary exactly as listed (no mirroring) plus the
    largest node id seen (-1 for an empty file).
    """
    arcs: dict[tuple[int, int], float] = {}
    max_id = -1
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise InputError(f"{path}:{lineno}: expected 'u v [w]', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: node ids must be integers") from None
        if u < 0 or v < 0:
            raise InputError(f"{path}:{lineno}: node ids must be non-negative")
        if u == v:
            raise InputError(f"{path}:{lineno}: self-loop on node {u} rejected")
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad weight {parts[2]!r}") from None
            if not np.isfinite(w) or w <= 0:
                raise InputError(f"{path}:{lineno}: weight must be positive, got {w}")
        arcs[(u, v)] = w
        max_id = max(max_id, u, v)
    return arcs, max_id


def load_edge_list(path, n_hint: int | None = None, directed: bool = False) -> Graph:
    """Load a Graph from a 'u v [w]' text file.

    Node count is max id + 1, or ``n_hint`` if larger.  Undirected edges
    are mirrored; duplicate lines overwrite (the last occurrence wins).
    """
    arcs, max_id = _parse_edge_lines(path)
    n = max_id + 1
    if n_hint is not None:
        if n_hint < n:
            raise InputError(
                f"n_hint={n_hint} is smaller than max node id {max_id} in {path}"
            )
        n = max(n, n_hint)
    adj = np.zeros((n, n))
    for (u, v), w in arcs.items():
        adj[u, v] = w
        if not directed:
            adj[v, u] = w
    return Graph(adj, directed=directed)


def save_edge_list(g: Graph, path) -> None:
    """Write a Graph in the load format.

    Undirected graphs emit each unordered pair once with u < v.  Unit
    weights are omitted; other weights use shortest exact decimals so a
    save/load round trip is bit-for-bit.
    """
    lines = []
    for u, v in edges(g):
        w = float(g.adjacency[u, v])
        lines.append(f"{u} {v}" if w == 1.0 else f"{u} {v} {w!r}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_labels(path, n: int) -> np.ndarray:
    """Load a per-node class file: one 'node label' pair per line.

    Every node 0..n-1 must appear exactly once.
    """
    seen: dict[int, int] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'node label', got {raw!r}")
        try:
            node, label = int(parts[0]), int(parts[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: ids must be integers") from None
        if node < 0 or label < 0:
            raise InputError(f"{path}:{lineno}: ids must be non-negative")
        if node >= n:
            raise InputError(f"{path}:{lineno}: node id {node} >= n={n}")
        if node in seen:
            raise InputError(f"{path}:{lineno}: duplicate label for node {node}")
        seen[node] = label
    missing = [i for i in range(n) if i not in seen]
    if missing:
        raise InputError(f"{path}: missing label for node(s) {missing[:5]}")
    return np.array([seen[i] for i in range(n)], dtype=int)


def edges(g: Graph) -> list[tuple[int, int]]:
    """Sorted support of the adjacency: (u, v) pairs with u < v when undirected."""
    if g.directed:
        us, vs = np.nonzero(g.adjacency)
    else:
        us, vs = np.nonzero(np.triu(g.adjacency))
    return sorted(zip(us.tolist(), vs.tolist()))


def edge_count(g: Graph) -> int:
    """Number of edges: unordered pairs for undirected graphs, arcs otherwise."""
    if g.directed:
        return int(np.count_nonzero(g.adjacency))
    return int(np.count_nonzero(np.triu(g.adjacency)))


def arc_count(g: Graph) -> int:
    """Number of nonzero adjacency entries regardless of directedness."""
    return int(np.count_nonzero(g.adjacency))


def edge_set_difference(
    g1: Graph, g2: Graph
) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Exact symmetric set difference of the two edge supports.

    Returns (added, removed): edges present only in g2, and only in g1.
    """
    if g1.n != g2.n:
        raise InputError(f"node-count mismatch: {g1.n} vs {g2.n}")
    if g1.directed != g2.directed:
        raise InputError("cannot diff directed against undirected")
    e1, e2 = set(edges(g1)), set(edges(g2))
    return sorted(e2 - e1), sorted(e1 - e2)


def remap_edge_list(src, dst, map_path=None) -> dict[int, int]:
    """Rewrite an edge list with sparse ids onto dense 0-based ids.

    Ids are assigned in ascending order of the original ids.  The mapping
    {original: new} is returned and, when ``map_path`` is given, also
    written as 'original new' lines.
    """
    arcs, _ = _parse_edge_lines(src)
    ids = sorted({i for pair in arcs for i in pair})
    mapping = {orig: new for new, orig in enumerate(ids)}
    lines = []
    for (u, v), w in sorted(arcs.items()):
        u2, v2 = mapping[u], mapping[v]
        lines.append(f"{u2} {v2}" if w == 1.0 else f"{u2} {v2} {float(w)!r}")
    Path(dst).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    if map_path is not None:
        body = "\n".join(f"{orig} {new}" for orig, new in sorted(mapping.items()))
        Path(map_path).write_text(body + ("\n" if body else ""), encoding="utf-8")
    return mapping
