"""Scalar and node-level perturbation dynamics.

The condensed one-dimensional vector field is

    dx/dt = -a x + beta * H x^2 / (theta x^2 + 1)

with fixed points at 0 and, when beta*H > 2a*sqrt(theta), at the two
positive roots of a*theta*x^2 - beta*H*x + a = 0.  The node-level field
couples every node through the adjacency with the same saturating
nonlinearity.  A small feedback-interconnection simulator with a
Lyapunov-certificate monitor covers the general linear-plus-nonlinearity
form the scalar model instantiates.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable

import numpy as np

from .errors import DivergenceError, InputError
from .graph import Graph, degree_profile

DIVERGENCE_LIMIT = 1e12
SEMISTABLE_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class ScalarDynamics:
    """Coefficients of the condensed scalar field."""

    a: float
    beta: float
    H: float
    theta: float

    def __post_init__(self):
        for name in ("a", "H", "theta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be finite and > 0, got {v}")
        if not (math.isfinite(self.beta) and self.beta >= 0):
            raise InputError(f"beta must be finite and >= 0, got {self.beta}")


@dataclasses.dataclass(frozen=True)
class FixedPoint:
    x_star: float
    kind: str  # "stable" | "unstable" | "semistable"


def rhs(d: ScalarDynamics, x: float) -> float:
    """Value of the scalar vector field at x."""
    x2 = x * x
    return -d.a * x + d.beta * d.H * x2 / (d.theta * x2 + 1.0)


def rhs_derivative(d: ScalarDynamics, x: float) -> float:
    """d(rhs)/dx, used to classify fixed points."""
    q = d.theta * x * x + 1.0
    return -d.a + d.beta * d.H * 2.0 * x / (q * q)


def fixed_points(d: ScalarDynamics) -> list[FixedPoint]:
    """All nonnegative fixed points with their stability kind.

    The origin is always present and stable (slope -a).  Above the
    critical coupling beta*H = 2a*sqrt(theta) a pair of positive roots
    appears: the smaller unstable, the larger stable.  At the critical
    coupling (within 1e-9) the pair collapses to one semistable point.
    """
    points = [FixedPoint(0.0, _classify(d, 0.0))]
    b_h = d.beta * d.H
    critical = 2.0 * d.a * math.sqrt(d.theta)
    if abs(b_h - critical) <= SEMISTABLE_TOL:
        points.append(FixedPoint(1.0 / math.sqrt(d.theta), "semistable"))
    elif b_h > critical:
        root = math.sqrt(b_h * b_h - 4.0 * d.a * d.a * d.theta)
        denom = 2.0 * d.a * d.theta
        lo, hi = (b_h - root) / denom, (b_h + root) / denom
        points.append(FixedPoint(lo, _classify(d, lo)))
        points.append(FixedPoint(hi, _classify(d, hi)))
    return points


def _classify(d: ScalarDynamics, x: float) -> str:
    slope = rhs_derivative(d, x)
    if abs(slope) <= SEMISTABLE_TOL:
        return "semistable"
    return "stable" if slope < 0 else "unstable"


def integrate(
    d: ScalarDynamics, x0: float, t_end: float, dt: float
) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-step 4th-order integration of the scalar field from x0 >= 0.

    Returns (t, x) sampled every dt.  The exact flow never crosses a
    fixed point, so any step that would is retried with halved substeps;
    that keeps the numerical trajectory monotone between fixed points.
    """
    if dt <= 0:
        raise InputError(f"dt must be > 0, got {dt}")
    if t_end < dt:
        raise InputError(f"t_end must be >= dt, got {t_end}")
    if x0 < 0:
        raise InputError("the condensed state is nonnegative; x0 must be >= 0")
    n_steps = int(round(t_end / dt))
    fps = [p.x_star for p in fixed_points(d)]
    a, b_h, th = d.a, d.beta * d.H, d.theta
    xs = np.empty(n_steps + 1)
    xs[0] = x = float(x0)
    for i in range(1, n_steps + 1):
        x = _scalar_step(x, dt, a, b_h, th, fps, 0)
        if not math.isfinite(x):
            raise DivergenceError(f"non-finite state at t={i * dt}")
        xs[i] = x
    return np.arange(n_steps + 1) * dt, xs


def _scalar_step(x, h, a, b_h, th, fps, depth):
    # Classical RK4, inlined: this loop dominates long integrations.
    x2 = x * x
    k1 = -a * x + b_h * x2 / (th * x2 + 1.0)
    u = x + 0.5 * h * k1
    u2 = u * u
    k2 = -a * u + b_h * u2 / (th * u2 + 1.0)
    u = x + 0.5 * h * k2
    u2 = u * u
    k3 = -a * u + b_h * u2 / (th * u2 + 1.0)
    u = x + h * k3
    u2 = u * u
    k4 = -a * u + b_h * u2 / (th * u2 + 1.0)
    x1 = x + h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
    for f in fps:
        if (x - f) * (x1 - f) < 0.0:
            if depth >= 60:
                raise DivergenceError("step refinement stalled at a fixed point")
            half = _scalar_step(x, 0.5 * h, a, b_h, th, fps, depth + 1)
            return _scalar_step(half, 0.5 * h, a, b_h, th, fps, depth + 1)
    return x1


def node_rhs(g: Graph, state, a_vec, H: float, theta: float) -> np.ndarray:
    """Node-level field: each edge u -> v feeds u's state into v's derivative.

    dx_v/dt = -a_vec[v] x_v + sum_u adjacency[u, v] * H x_u^2 / (theta x_u^2 + 1)
    """
    x = np.asarray(state, dtype=float)
    a = np.asarray(a_vec, dtype=float)
    if x.shape != (g.n,) or a.shape != (g.n,):
        raise InputError(
            f"state and a_vec must have length {g.n}, got {x.shape} and {a.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise InputError("state contains non-finite entries")
    coupling = H * x * x / (theta * x * x + 1.0)
    return -a * x + g.adjacency.T @ coupling


def default_node_decay(g: Graph, eta: float) -> np.ndarray:
    """Per-node decay coefficients eta * centrality, the default for node_rhs."""
    return eta * degree_profile(g).centrality


@dataclasses.dataclass(frozen=True)
class LurieSystem:
    """Linear dynamics in feedback with a memoryless nonlinearity.

    dx/dt = A x - B phi(y),  y = C x.  ``sector`` holds the per-channel
    gains k_i > 0 bounding the nonlinearity (M = diag(1/k_i));  ``psi``
    holds the nonnegative certificate multipliers gamma_i.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    phi: Callable[[np.ndarray], np.ndarray]
    sector: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise InputError(f"A must be square, got {A.shape}")
        n = A.shape[0]
        if B.shape[0] != n or C.shape[1] != n or B.shape[1] != C.shape[0]:
            raise InputError(
                f"inconsistent dimensions: A {A.shape}, B {B.shape}, C {C.shape}"
            )
        p = B.shape[1]
        sector = np.atleast_1d(np.asarray(self.sector, dtype=float))
        psi = np.atleast_1d(np.asarray(self.psi, dtype=float))
        if sector.shape != (p,) or psi.shape != (p,):
            raise InputError(f"sector and psi must have length {p}")
        if np.any(sector <= 0):
            raise InputError("sector gains k_i must be > 0")
        if np.any(psi < 0):
            raise InputError("multipliers gamma_i must be >= 0")
        for name, val in (("A", A), ("B", B), ("C", C), ("sector", sector), ("psi", psi)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def p(self) -> int:
        return self.B.shape[1]

    @property
    def M(self) -> np.ndarray:
        return np.diag(1.0 / self.sector)


@dataclasses.dataclass(frozen=True)
class LurieTrajectory:
    """Samples of a feedback simulation: states, outputs, nonlinearity values."""

    t: np.ndarray
    x: np.ndarray  # (steps+1, n)
    y: np.ndarray  # (steps+1, p)
    phi_y: np.ndarray  # (steps+1, p)


def lurie_simulate(
    sys: LurieSystem, x0, t_end: float, dt: float
) -> LurieTrajectory:
    """Fixed-step RK4 for dx/dt = A x - B phi(C x).

    Raises DivergenceError when the state exceeds the blow-up cutoff,
    which signals that the stability hypotheses do not hold.
    """
    if dt <= 0:
        raise InputError(f"dt must be > 0, got {dt}")
    if t_end < dt:
        raise InputError(f"t_end must be >= dt, got {t_end}")
    x = np.atleast_1d(np.asarray(x0, dtype=float))
    if x.shape != (sys.n,):
        raise InputError(f"x0 must have length {sys.n}, got {x.shape}")
    A, B, C, phi = sys.A, sys.B, sys.C, sys.phi
    n_steps = int(round(t_end / dt))
    xs = np.empty((n_steps + 1, sys.n))
    xs[0] = x

    def f(state):
        return A @ state - B @ phi(C @ state)

    for i in range(1, n_steps + 1):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"trajectory diverged at t={i * dt}: |x| exceeded {DIVERGENCE_LIMIT:g}"
            )
        xs[i] = x
    ys = xs @ C.T
    phis = np.empty_like(ys)
    for i, y in enumerate(ys):
        phis[i] = phi(y)
    return LurieTrajectory(t=np.arange(n_steps + 1) * dt, x=xs, y=ys, phi_y=phis)


def lyapunov_certificate(
    sys: LurieSystem, P: np.ndarray, trajectory: LurieTrajectory
) -> bool:
    """Check that V = x'Px/2 + sum_i gamma_i * int_0^{y_i} phi_i never increases.

    The per-channel integrals are evaluated numerically: a fixed
    quadrature from 0 to the initial output, then cumulative trapezoids
    along the sampled outputs.  Requires a componentwise nonlinearity.
    Tolerance per step is 1e-9 * V(0).
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape != (sys.n, sys.n):
        raise InputError(f"P must be {sys.n}x{sys.n}, got {P.shape}")
    if np.max(np.abs(P - P.T)) > 1e-12:
        raise InputError("P must be symmetric within 1e-12")
    if np.min(np.linalg.eigvalsh(P)) <= 0:
        raise InputError("P must be positive definite")
    xs, ys, phis = trajectory.x, trajectory.y, trajectory.phi_y
    v = 0.5 * np.einsum("ti,ij,tj->t", xs, P, xs)
    if np.any(sys.psi > 0):
        # int_0^{y(0)} phi: quadrature along the ray s*y(0), exact for
        # componentwise phi since each channel varies independently.
        grid = np.linspace(0.0, 1.0, 257)
        ray = np.empty((grid.size, sys.p))
        for i, s in enumerate(grid):
            ray[i] = sys.phi(s * ys[0])
        weights = 0.5 * (ray[1:] + ray[:-1]).sum(axis=0) * (grid[1] - grid[0])
        f0 = weights * ys[0]
        increments = 0.5 * (phis[1:] + phis[:-1]) * np.diff(ys, axis=0)
        integrals = np.vstack([f0, f0 + np.cumsum(increments, axis=0)])
        v = v + integrals @ sys.psi
    tol = 1e-9 * v[0]
    return bool(np.all(np.diff(v) <= tol))
