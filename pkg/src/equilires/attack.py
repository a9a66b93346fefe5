"""Seeded graph perturbations and ingestion of externally attacked matrices."""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import BudgetError, InputError
from .graph import Graph, _parse_edge_lines, edge_count, edge_set_difference

# Recorded in attack sidecars so experiments replay across platforms.
RNG_ALGORITHM = "numpy-pcg64"


@dataclasses.dataclass(frozen=True)
class AttackBudget:
    """Either a fraction of the clean edge count or an explicit count."""

    rate: float | None = None
    count: int | None = None

    def __post_init__(self):
        if (self.rate is None) == (self.count is None):
            raise InputError("set exactly one of rate/count")
        if self.rate is not None and not 0 <= self.rate <= 1:
            raise InputError(f"rate must be in [0, 1], got {self.rate}")
        if self.count is not None and self.count < 0:
            raise InputError(f"count must be >= 0, got {self.count}")

    def resolve(self, g: Graph) -> int:
        """Number of modifications for graph g."""
        if self.count is not None:
            return self.count
        return int(round(self.rate * edge_count(g)))


def _pairs_upper(n):
    us, vs = np.triu_indices(n, k=1)
    return us, vs


def dice_attack(g: Graph, budget: AttackBudget, seed: int) -> Graph:
    """Delete-internal / connect-external heuristic perturbation.

    Each modification flips a fair coin: delete a uniformly random
    existing intra-class edge, or add a uniformly random absent
    inter-class edge.  When one action runs out, the other is used.
    Deterministic for a fixed seed.
    """
    if g.labels is None:
        raise InputError("dice attack requires node labels")
    if g.directed:
        raise InputError("dice attack is defined for undirected graphs")
    count = budget.resolve(g)
    labels = g.labels
    adj = np.array(g.adjacency)
    us, vs = np.nonzero(np.triu(adj))
    intra = [(int(u), int(v)) for u, v in zip(us, vs) if labels[u] == labels[v]]
    us, vs = _pairs_upper(g.n)
    absent = adj[us, vs] == 0
    differ = labels[us] != labels[vs]
    inter_absent = [
        (int(u), int(v)) for u, v in zip(us[absent & differ], vs[absent & differ])
    ]
    if count > len(intra) + len(inter_absent):
        raise BudgetError(
            f"budget {count} exceeds the {len(intra) + len(inter_absent)} "
            "feasible modifications"
        )
    rng = np.random.default_rng(seed)
    for _ in range(count):
        delete = rng.random() < 0.5
        if delete and not intra:
            delete = False
        elif not delete and not inter_absent:
            delete = True
        if delete:
            u, v = intra.pop(int(rng.integers(len(intra))))
            adj[u, v] = adj[v, u] = 0.0
        else:
            u, v = inter_absent.pop(int(rng.integers(len(inter_absent))))
            adj[u, v] = adj[v, u] = 1.0
    return g.with_adjacency(adj)


def random_attack(g: Graph, budget: AttackBudget, seed: int) -> Graph:
    """Flip `count` distinct uniformly random off-diagonal edge slots.

    Present slots are zeroed, absent slots get weight 1.0.  Undirected
    graphs flip unordered pairs; deterministic for a fixed seed.
    """
    count = budget.resolve(g)
    adj = np.array(g.adjacency)
    if g.directed:
        us, vs = np.nonzero(~np.eye(g.n, dtype=bool))
    else:
        us, vs = _pairs_upper(g.n)
    if count > us.size:
        raise BudgetError(f"budget {count} exceeds the {us.size} edge slots")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(us.size, size=count, replace=False)
    for idx in chosen:
        u, v = int(us[idx]), int(vs[idx])
        w = 0.0 if adj[u, v] > 0 else 1.0
        adj[u, v] = w
        if not g.directed:
            adj[v, u] = w
    return g.with_adjacency(adj)


def perturbation_rate(clean: Graph, perturbed: Graph) -> float:
    """(edges added + edges removed) / clean edge count."""
    m = edge_count(clean)
    if m == 0:
        raise InputError("perturbation rate is undefined for an edgeless clean graph")
    added, removed = edge_set_difference(clean, perturbed)
    return (len(added) + len(removed)) / m


def load_perturbed_matrix(path, clean: Graph | None = None, directed: bool = False) -> Graph:
    """Load an externally produced perturbed graph in edge-list format.

    When a companion clean graph is given, its directedness wins, the
    node count is padded to match, and (for undirected graphs) any pair
    listed in both directions with conflicting weights is rejected as an
    asymmetric matrix.
    """
    if clean is not None:
        directed = clean.directed
    arcs, max_id = _parse_edge_lines(path)
    n = max_id + 1
    if clean is not None:
        if n > clean.n:
            raise InputError(
                f"{path}: node id {max_id} exceeds the clean graph's n={clean.n}"
            )
        n = clean.n
    adj = np.zeros((n, n))
    if directed:
        for (u, v), w in arcs.items():
            adj[u, v] = w
    else:
        for (u, v), w in arcs.items():
            mirror = arcs.get((v, u))
            if mirror is not None and mirror != w:
                raise InputError(
                    f"{path}: asymmetric weights for pair ({u}, {v}): {w} vs {mirror}"
                )
            adj[u, v] = adj[v, u] = w
    return Graph(adj, directed=directed)
