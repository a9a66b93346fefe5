"""Condensed graph state and the equilibrium-point trajectory.

The whole graph's dynamics are condensed into one dimension by an
out-degree-weighted mean of per-node quantities.  The resulting pair
(x_tilde, beta_tilde) is the coordinate the defense steers, and
beta(x) = a (theta x^2 + 1) / (H x) is the curve of stationary states
of the scalar dynamics.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import InputError
from .graph import Graph, degree_profile

# Per-dataset (theta, eta) defaults for the trajectory shape.
PRESETS: dict[str, tuple[float, float]] = {
    "polblogs": (16.6**2, 0.45),
    "cora_ml": (24.0**2, 10.0),
    "cora": (21.0**2, 10.0),
    "citeseer": (21.0**2, 10.0),
    "amazon_photo": (31.8**2, 8.0),
}


@dataclasses.dataclass(frozen=True)
class GraphState:
    """Condensed pair: beta_tilde (in-degree weight) and x_tilde (centrality)."""

    beta_tilde: float
    x_tilde: float

    def __post_init__(self):
        for name in ("beta_tilde", "x_tilde"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise InputError(f"{name} must be finite and >= 0, got {v}")


@dataclasses.dataclass(frozen=True)
class TrajectoryParams:
    """Coefficients of the scalar dynamics and its equilibrium curve."""

    a: float
    H: float
    theta: float
    eta: float

    def __post_init__(self):
        for name in ("a", "H", "theta", "eta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be finite and > 0, got {v}")


def preset_params(name: str) -> tuple[float, float]:
    """(theta, eta) for a named dataset preset."""
    try:
        return PRESETS[name]
    except KeyError:
        raise InputError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)} or 'custom'"
        ) from None


def hmf_average(g: Graph, values) -> float:
    """Out-degree-weighted mean: sum_j out_deg[j] * values[j] / sum_j out_deg[j]."""
    values = np.asarray(values, dtype=float)
    if values.shape != (g.n,):
        raise InputError(f"values must have length {g.n}, got {values.shape}")
    out_deg = g.adjacency.sum(axis=1)
    total = out_deg.sum()
    if total == 0:
        raise InputError("edgeless graph: the weighted mean is undefined")
    return float(out_deg @ values / total)


def matrix_state(adjacency: np.ndarray) -> GraphState:
    """Condensed state straight from a raw adjacency matrix.

    beta_tilde = sum(out_deg * in_deg) / sum(out_deg)
    x_tilde    = sum(out_deg * centrality) / sum(out_deg)
    """
    n = adjacency.shape[0]
    if n < 2:
        raise InputError("graph state needs at least 2 nodes")
    in_deg = adjacency.sum(axis=0)
    out_deg = adjacency.sum(axis=1)
    total = out_deg.sum()
    if total == 0:
        raise InputError("edgeless graph has no condensed state")
    centrality = (in_deg + out_deg) / (n - 1)
    return GraphState(
        beta_tilde=float(out_deg @ in_deg / total),
        x_tilde=float(out_deg @ centrality / total),
    )


def compute_state(g: Graph) -> GraphState:
    return matrix_state(g.adjacency)


def compute_a(g: Graph, eta: float) -> float:
    """Self-dynamics coefficient: eta * (sum C_in + sum C_out) / n.

    Centralities use the weighted degree vectors; on unit-weight graphs
    this coincides with neighbor counting.
    """
    if eta <= 0:
        raise InputError(f"eta must be > 0, got {eta}")
    prof = degree_profile(g)
    c_in = prof.in_deg / (g.n - 1)
    c_out = prof.out_deg / (g.n - 1)
    return float(eta * (c_in.sum() + c_out.sum()) / g.n)


def compute_H(g: Graph) -> float:
    """Average in-degree weight: total adjacency weight / n."""
    if g.n < 1:
        raise InputError("empty graph")
    return float(g.adjacency.sum() / g.n)


def params_for(g: Graph, theta: float, eta: float) -> TrajectoryParams:
    """Bundle a graph's computed (a, H) with configured (theta, eta)."""
    return TrajectoryParams(a=compute_a(g, eta), H=compute_H(g), theta=theta, eta=eta)


def trajectory_beta(x: float, p: TrajectoryParams) -> float:
    """Equilibrium curve beta(x) = a (theta x^2 + 1) / (H x), defined for x > 0."""
    if x <= 0:
        raise InputError(f"the trajectory is defined for x > 0, got x={x}")
    return p.a * (p.theta * x * x + 1.0) / (p.H * x)


def trajectory_minimum(p: TrajectoryParams) -> tuple[float, float]:
    """Lowest point of the equilibrium curve: (1/sqrt(theta), 2 a sqrt(theta) / H)."""
    rt = math.sqrt(p.theta)
    return 1.0 / rt, 2.0 * p.a * rt / p.H


def sector_bound_k_min(H: float, theta: float) -> float:
    """Smallest admissible sector gain: H / (2 sqrt(theta))."""
    if H <= 0 or theta <= 0:
        raise InputError(f"H and theta must be > 0, got H={H}, theta={theta}")
    return H / (2.0 * math.sqrt(theta))


def sample_trajectory(
    p: TrajectoryParams, x_lo: float, x_hi: float, steps: int
) -> list[tuple[float, float]]:
    """Evaluate the equilibrium curve on `steps` evenly spaced x in [x_lo, x_hi]."""
    if not (0 < x_lo <= x_hi):
        raise InputError(f"need 0 < x_lo <= x_hi, got [{x_lo}, {x_hi}]")
    if steps < 2:
        raise InputError(f"steps must be >= 2, got {steps}")
    xs = np.linspace(x_lo, x_hi, steps)
    return [(float(x), trajectory_beta(float(x), p)) for x in xs]
