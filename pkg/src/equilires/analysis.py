"""Spectral diagnostics: singular values, numerical rank, comparisons."""

from __future__ import annotations

import dataclasses
import math
import time

import numpy as np
import scipy.sparse.linalg

from .attack import perturbation_rate
from .equilibrium import GraphState, matrix_state
from .errors import InputError
from .graph import Graph, edge_count

DENSE_LIMIT = 3000
RANK_REL_TOL = 1e-8


@dataclasses.dataclass(frozen=True)
class SpectralReport:
    numerical_rank: int
    singular_values: list[float]
    sigma_max: float
    graph_state: GraphState | None
    apr: float | None = None
    # True when only a top-k decomposition was computed, making the rank
    # a lower bound.
    rank_is_lower_bound: bool = False


def singular_values(g: Graph, k: int | None = None) -> np.ndarray:
    """Singular values of the adjacency, descending.

    Full dense decomposition up to n = 3000; top-k via a deterministic
    restarted iterative solver for larger matrices or when k is given.
    """
    n = g.n
    if k is None:
        if n > DENSE_LIMIT:
            raise InputError(
                f"full decomposition limited to n <= {DENSE_LIMIT}; pass k"
            )
        return np.linalg.svd(g.adjacency, compute_uv=False)
    if not 1 <= k <= n:
        raise InputError(f"k must be in [1, {n}], got {k}")
    if k > n - 2 or n < 8:
        s = np.linalg.svd(g.adjacency, compute_uv=False)
        return s[:k]
    v0 = np.full(n, 1.0 / math.sqrt(n))  # fixed start vector for determinism
    s = scipy.sparse.linalg.svds(
        g.adjacency, k=k, v0=v0, return_singular_vectors=False
    )
    return np.sort(s)[::-1]


def numerical_rank(g: Graph, rel_tol: float = RANK_REL_TOL) -> int:
    """Count of singular values above rel_tol * sigma_max (0 for a zero matrix)."""
    s = singular_values(g)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def spectral_report(
    g: Graph,
    k: int | None = None,
    apr: float | None = None,
    rel_tol: float = RANK_REL_TOL,
) -> SpectralReport:
    s = singular_values(g, k=k)
    truncated = k is not None and k < g.n
    sigma_max = float(s[0]) if s.size else 0.0
    rank = int(np.count_nonzero(s > rel_tol * sigma_max)) if sigma_max > 0 else 0
    state = matrix_state(g.adjacency) if edge_count(g) > 0 else None
    return SpectralReport(
        numerical_rank=rank,
        singular_values=[float(v) for v in s],
        sigma_max=sigma_max,
        graph_state=state,
        apr=apr,
        rank_is_lower_bound=truncated,
    )


def _state_distance(a: GraphState | None, b: GraphState | None) -> float | None:
    if a is None or b is None:
        return None
    return math.hypot(a.x_tilde - b.x_tilde, a.beta_tilde - b.beta_tilde)


def compare(
    clean: Graph,
    perturbed: Graph,
    defended: Graph | None = None,
    k: int | None = None,
    rel_tol: float = RANK_REL_TOL,
) -> dict:
    """Assemble the before/attack/defense diagnostics as a JSON-able dict."""
    if perturbed.n != clean.n or (defended is not None and defended.n != clean.n):
        raise InputError("all graphs must share the same node count")
    start = time.perf_counter()
    apr = perturbation_rate(clean, perturbed)
    reports = {
        "clean": spectral_report(clean, k=k, rel_tol=rel_tol),
        "perturbed": spectral_report(perturbed, k=k, apr=apr, rel_tol=rel_tol),
    }
    if defended is not None:
        reports["defended"] = spectral_report(defended, k=k, rel_tol=rel_tol)
    out: dict = {"apr": apr}
    for name, rep in reports.items():
        out[f"rank_{name}"] = rep.numerical_rank
        out[f"sigma_max_{name}"] = rep.sigma_max
        st = rep.graph_state
        out[f"state_{name}"] = (
            None
            if st is None
            else {"beta_tilde": st.beta_tilde, "x_tilde": st.x_tilde}
        )
    ref = reports["clean"].graph_state
    out["distance_to_clean_state"] = {
        "perturbed": _state_distance(reports["perturbed"].graph_state, ref),
        "defended": (
            _state_distance(reports["defended"].graph_state, ref)
            if defended is not None
            else None
        ),
    }
    out["rank_is_lower_bound"] = any(r.rank_is_lower_bound for r in reports.values())
    out["elapsed_seconds"] = time.perf_counter() - start
    return out
