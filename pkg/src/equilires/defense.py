"""Similarity-guided adjacency purification.

Every current edge is scored by the Jaccard similarity of its endpoints'
2-hop neighborhoods; edges are then deleted in ascending-similarity
order, and a deletion is kept only when it strictly raises both
condensed state coordinates past the best values seen so far.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .equilibrium import GraphState, matrix_state
from .errors import InputError
from .graph import Graph, edge_count, edge_set_difference

Entry = tuple[int, int, float]


@dataclasses.dataclass(frozen=True)
class SimilarityList:
    """Edge similarities sorted ascending, ties broken by (u, v)."""

    entries: list[Entry]

    def __post_init__(self):
        key = [(s, u, v) for u, v, s in self.entries]
        if key != sorted(key):
            raise InputError("entries must be sorted by (similarity, u, v)")
        if any(not 0 <= s <= 1 for _, _, s in self.entries):
            raise InputError("similarities must lie in [0, 1]")

    def __len__(self) -> int:
        return len(self.entries)


@dataclasses.dataclass(frozen=True)
class DefenseReport:
    removed_edges: list[tuple[int, int]]
    initial_state: GraphState
    final_state: GraphState | None
    iterations: int
    critical_beta: float
    critical_x: float
    # Accepted (beta, x) pairs in order; strictly increasing componentwise.
    acceptance_history: list[GraphState]
    # Distances to a reference clean state, when one was supplied.
    distance_initial: float | None = None
    distance_final: float | None = None


def _support(adjacency: np.ndarray) -> np.ndarray:
    return (adjacency > 0) | (adjacency.T > 0)


def _two_hop_matrix(adjacency: np.ndarray) -> np.ndarray:
    """Boolean reach-in-1-or-2-hops matrix over the undirected support."""
    s = _support(adjacency)
    sf = s.astype(np.float32)
    reach = s | ((sf @ sf) > 0)
    np.fill_diagonal(reach, False)
    return reach


def two_hop_set(g: Graph, i: int) -> set[int]:
    """Nodes reachable from i in 1 or 2 hops (undirected support), minus i."""
    if not 0 <= i < g.n:
        raise InputError(f"node {i} out of range for n={g.n}")
    s = _support(g.adjacency)
    one = s[i]
    reach = one | s[one].any(axis=0) if one.any() else one.copy()
    reach = reach.copy()
    reach[i] = False
    return set(np.nonzero(reach)[0].tolist())


def edge_similarity(g: Graph, u: int, v: int) -> float:
    """Jaccard similarity of the 2-hop sets of u and v (0 when both empty)."""
    if u == v:
        raise InputError("similarity needs two distinct nodes")
    su, sv = two_hop_set(g, u), two_hop_set(g, v)
    union = len(su | sv)
    if union == 0:
        return 0.0
    return len(su & sv) / union


def calculate_edge_simi(g: Graph) -> SimilarityList:
    """Score every undirected edge (u < v) and sort ascending."""
    if edge_count(g) == 0:
        raise InputError("edgeless graph has no edges to score")
    reach = _two_hop_matrix(g.adjacency)
    us, vs = np.nonzero(np.triu(_support(g.adjacency)))
    entries: list[Entry] = []
    for u, v in zip(us.tolist(), vs.tolist()):
        union = int(np.count_nonzero(reach[u] | reach[v]))
        inter = int(np.count_nonzero(reach[u] & reach[v]))
        entries.append((u, v, inter / union if union else 0.0))
    entries.sort(key=lambda e: (e[2], e[0], e[1]))
    return SimilarityList(entries)


def remove_low_simi_edges(
    matrix: np.ndarray, simi: SimilarityList, batch: int = 1
) -> tuple[np.ndarray, SimilarityList]:
    """Delete the first `batch` listed edges from a copy of the matrix.

    Both directions are zeroed.  The consumed entries are popped from the
    returned list; similarities are not recomputed.  A list shorter than
    the batch just removes what remains.
    """
    if batch < 1:
        raise InputError(f"batch must be >= 1, got {batch}")
    if not simi.entries:
        raise InputError("similarity list is empty")
    out = np.array(matrix, dtype=float)
    taken = simi.entries[:batch]
    for u, v, _ in taken:
        out[u, v] = 0.0
        out[v, u] = 0.0
    return out, SimilarityList(simi.entries[batch:])


def defend(
    g: Graph,
    rop: float,
    batch: int = 1,
    literal_stop: bool = False,
    recompute_every: int = 0,
    clean: Graph | None = None,
) -> tuple[Graph, DefenseReport]:
    """Iteratively remove low-similarity edges, keeping state-improving steps.

    Each iteration deletes the next `batch` lowest-similarity edges from
    a copy of the best graph so far; the candidate replaces the best only
    when both condensed coordinates strictly exceed the running critical
    values (starting from 0, so the first candidate is always kept).
    ``rop`` is the removal budget: the loop stops once ceil(initial edge
    count * rop) removal operations were applied.  ``literal_stop``
    instead runs until the similarity list has shrunk to rop times its
    initial length.  ``recompute_every`` > 0 rescores the surviving edges
    of the current best every that many iterations.
    """
    if not 0 <= rop <= 1:
        raise InputError(f"rop must be in [0, 1], got {rop}")
    m0 = edge_count(g)
    if m0 == 0:
        raise InputError("cannot defend an edgeless graph")
    simi = calculate_edge_simi(g)
    initial_len = len(simi)
    best = np.array(g.adjacency)
    critical_beta = 0.0
    critical_x = 0.0
    history: list[GraphState] = []
    budget = math.ceil(m0 * rop)
    popped = 0
    iterations = 0
    while simi.entries:
        if not literal_stop and popped >= budget:
            break
        if recompute_every and iterations and iterations % recompute_every == 0:
            if not best.any():
                break
            kept = {e[:2] for e in simi.entries}
            rescored = calculate_edge_simi(g.with_adjacency(best))
            simi = SimilarityList(
                sorted(
                    (e for e in rescored.entries if e[:2] in kept),
                    key=lambda e: (e[2], e[0], e[1]),
                )
            )
            if not simi.entries:
                break
        before = len(simi)
        candidate, simi = remove_low_simi_edges(best, simi, batch)
        popped += before - len(simi)
        iterations += 1
        if candidate.any():
            state = matrix_state(candidate)
            if state.beta_tilde > critical_beta and state.x_tilde > critical_x:
                critical_beta = state.beta_tilde
                critical_x = state.x_tilde
                best = candidate
                history.append(state)
        if literal_stop and len(simi) <= initial_len * rop:
            break
    purified = g.with_adjacency(best)
    _, removed = edge_set_difference(g, purified)
    final_state = matrix_state(best) if best.any() else None
    dist_initial = dist_final = None
    if clean is not None:
        ref = matrix_state(clean.adjacency)
        start = matrix_state(g.adjacency)
        dist_initial = math.hypot(
            start.x_tilde - ref.x_tilde, start.beta_tilde - ref.beta_tilde
        )
        if final_state is not None:
            dist_final = math.hypot(
                final_state.x_tilde - ref.x_tilde,
                final_state.beta_tilde - ref.beta_tilde,
            )
    return purified, DefenseReport(
        removed_edges=removed,
        initial_state=matrix_state(g.adjacency),
        final_state=final_state,
        iterations=iterations,
        critical_beta=critical_beta,
        critical_x=critical_x,
        acceptance_history=history,
        distance_initial=dist_initial,
        distance_final=dist_final,
    )
