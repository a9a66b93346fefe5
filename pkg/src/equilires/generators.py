"""Seeded synthetic graphs for experiments and tests."""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .graph import Graph


def sbm_graph(
    n: int, blocks: int, p_in: float, p_out: float, seed: int
) -> Graph:
    """Undirected stochastic block model with near-equal block sizes.

    Node labels carry the block assignment, so the result can be fed
    straight into the label-aware attack.
    """
    if blocks < 1 or n < blocks:
        raise InputError(f"need 1 <= blocks <= n, got blocks={blocks}, n={n}")
    if not (0 <= p_in <= 1 and 0 <= p_out <= 1):
        raise InputError("probabilities must lie in [0, 1]")
    sizes = [n // blocks] * blocks
    for i in range(n % blocks):
        sizes[i] += 1
    labels = np.repeat(np.arange(blocks), sizes)
    rng = np.random.default_rng(seed)
    prob = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    upper = np.triu(rng.random((n, n)) < prob, k=1)
    adj = (upper | upper.T).astype(float)
    return Graph(adj, directed=False, labels=labels)


def gnp_graph(
    n: int,
    p: float,
    seed: int,
    directed: bool = False,
    weighted: bool = False,
) -> Graph:
    """Erdos-Renyi G(n, p), optionally directed and with uniform(0.5, 1.5) weights."""
    if not 0 <= p <= 1:
        raise InputError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    if not directed:
        mask = np.triu(mask, k=1)
        mask = mask | mask.T
    adj = mask.astype(float)
    if weighted:
        w = rng.uniform(0.5, 1.5, size=(n, n))
        if not directed:
            w = np.triu(w, k=1)
            w = w + w.T
        adj = adj * w
    return Graph(adj, directed=directed)
