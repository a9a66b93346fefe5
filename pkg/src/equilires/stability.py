"""Numerical verification of the stability theory.

Hurwitz tests, a Lyapunov-equation solver, transfer-function evaluation,
sector-condition checks, strict-positive-real frequency sweeps, and a
numeric Laplace transform.  Everything is desk scale: dense linear
algebra, matrices up to 64x64.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import InputError, NumericError

HURWITZ_TOL = 1e-12
MAX_DENSE_N = 64


def _square(A, name="A") -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=A.dtype if hasattr(A, "dtype") else float))
    if A.shape[0] != A.shape[1]:
        raise InputError(f"{name} must be square, got {A.shape}")
    return A


def is_hurwitz(A) -> bool:
    """True iff every eigenvalue has real part < -1e-12.

    Boundary cases (imaginary-axis eigenvalues) are classified as not
    Hurwitz.  Dense eigen-solve, limited to n <= 64.
    """
    A = _square(np.asarray(A, dtype=float))
    if A.shape[0] > MAX_DENSE_N:
        raise InputError(f"dense eigenvalue test limited to n <= {MAX_DENSE_N}")
    try:
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue solver failed: {exc}") from exc
    return bool(np.all(lam.real < -HURWITZ_TOL))


@dataclasses.dataclass(frozen=True)
class LyapunovSolution:
    """Solution P of A'P + PA = -Q together with its achieved residual."""

    P: np.ndarray
    residual: float


def solve_lyapunov(A, Q) -> LyapunovSolution:
    """Solve A'P + PA = -Q for symmetric positive definite P.

    Uses the vectorized linear system (kron(I, A') + kron(A', I)) vec(P)
    = -vec(Q), which is simple to verify and adequate for n <= 64.
    A must be Hurwitz (otherwise a solution may exist but positive
    definiteness is not guaranteed) and Q symmetric positive definite.
    """
    A = _square(np.asarray(A, dtype=float))
    Q = _square(np.asarray(Q, dtype=float), "Q")
    n = A.shape[0]
    if Q.shape != (n, n):
        raise InputError(f"Q must match A: {Q.shape} vs {A.shape}")
    if np.max(np.abs(Q - Q.T)) > 1e-12:
        raise InputError("Q must be symmetric")
    if np.min(np.linalg.eigvalsh(Q)) <= 0:
        raise InputError("Q must be positive definite")
    if not is_hurwitz(A):
        raise InputError("A must be Hurwitz for a positive definite solution")
    eye = np.eye(n)
    K = np.kron(eye, A.T) + np.kron(A.T, eye)
    try:
        vec_p = np.linalg.solve(K, -Q.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular vectorized Lyapunov system: {exc}") from exc
    P = vec_p.reshape(n, n)
    P = 0.5 * (P + P.T)
    residual = float(np.linalg.norm(A.T @ P + P @ A + Q, "fro"))
    bound = 1e-10 * np.linalg.norm(Q, "fro")
    if residual >= bound:
        raise NumericError(
            f"Lyapunov residual {residual:.3e} exceeds {bound:.3e}"
        )
    if np.min(np.linalg.eigvalsh(P)) <= 0:
        raise NumericError("computed P is not positive definite")
    return LyapunovSolution(P=P, residual=residual)


def transfer_function(A, B, C, s: complex) -> np.ndarray:
    """G(s) = C (sI - A)^{-1} B, evaluated by a linear solve."""
    A = _square(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    C = np.atleast_2d(np.asarray(C, dtype=complex))
    n = A.shape[0]
    if B.shape[0] != n or C.shape[1] != n:
        raise InputError(
            f"inconsistent dimensions: A {A.shape}, B {B.shape}, C {C.shape}"
        )
    resolvent = s * np.eye(n) - A
    try:
        X = np.linalg.solve(resolvent, B)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"resolvent singular at s={s}") from exc
    return C @ X


@dataclasses.dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing positive frequencies (rad/time) for SPR sweeps."""

    omegas: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        if om.ndim != 1 or om.size == 0:
            raise InputError("omegas must be a nonempty 1-D sequence")
        if om[0] <= 0 or np.any(np.diff(om) <= 0):
            raise InputError("omegas must be strictly increasing and positive")
        om.setflags(write=False)
        object.__setattr__(self, "omegas", om)

    @classmethod
    def log_spaced(cls, lo: float = 1e-6, hi: float = 1e6, points: int = 400):
        return cls(np.logspace(math.log10(lo), math.log10(hi), points))


def _diag(v, p, name) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim == 2:
        if np.max(np.abs(v - np.diag(np.diagonal(v)))) > 0:
            raise InputError(f"{name} must be diagonal")
        v = np.diagonal(v).copy()
    if v.shape != (p,):
        raise InputError(f"{name} must have {p} diagonal entries, got {v.shape}")
    return v


def spr_check(A, B, C, M, psi, grid: FrequencyGrid) -> tuple[bool, float]:
    """Test positivity of the Hermitian part of M + (I + jw psi) G(jw).

    Sweeps the grid plus the two analytic limits (w -> 0 gives M + G(0);
    w -> inf gives M + psi C B).  A finite grid cannot prove strict
    positive realness, so the result is 'passed on grid' semantics:
    (all minimum eigenvalues > 0, worst margin found).
    """
    A = _square(np.asarray(A, dtype=float))
    if not is_hurwitz(A):
        raise InputError("SPR sweep requires a Hurwitz A")
    B2 = np.atleast_2d(np.asarray(B, dtype=float))
    C2 = np.atleast_2d(np.asarray(C, dtype=float))
    p = B2.shape[1]
    m_diag = _diag(M, p, "M")
    g_diag = _diag(psi, p, "psi")
    # Multiplier admissibility: 1 + lambda_k * gamma_i must stay nonzero.
    # Automatic for gamma >= 0 and Hurwitz A; kept as a guard.
    lam = np.linalg.eigvals(A)
    prods = 1.0 + np.multiply.outer(lam, g_diag)
    if np.any(np.abs(prods) < 1e-14):
        raise NumericError("degenerate multiplier: 1 + lambda*gamma vanished")
    M_mat = np.diag(m_diag)
    psi_mat = np.diag(g_diag)
    eye = np.eye(p)
    margin = math.inf
    for omega in grid.omegas:
        G = transfer_function(A, B2, C2, 1j * omega)
        Gt = M_mat + (eye + 1j * omega * psi_mat) @ G
        herm = Gt + Gt.conj().T
        margin = min(margin, float(np.linalg.eigvalsh(herm).min()))
    # Limits: G(j0) exactly, and lim jw*psi*G(jw) = psi C B as w -> inf.
    G0 = transfer_function(A, B2, C2, 0.0).real
    herm0 = (M_mat + G0) + (M_mat + G0).T
    margin = min(margin, float(np.linalg.eigvalsh(herm0).min()))
    Ginf = M_mat + psi_mat @ C2 @ B2
    herm_inf = Ginf + Ginf.T
    margin = min(margin, float(np.linalg.eigvalsh(herm_inf).min()))
    return margin > 0, margin


def scalar_spr_value(
    a: float, beta: float, gamma: float, k: float, omega: float
) -> float:
    """Closed form of the 1-D Hermitian part: 2/k + 2 beta (a + gamma w^2) / (a^2 + w^2)."""
    return 2.0 / k + 2.0 * beta * (a + gamma * omega * omega) / (a * a + omega * omega)


def sector_condition_check(phi, k: float, y_samples) -> bool:
    """True iff phi(y) * (y - phi(y)/k) > 0 at every sample.

    The condition is only meaningful for nonzero arguments, so zero
    samples are rejected.
    """
    if k <= 0:
        raise InputError(f"sector gain k must be > 0, got {k}")
    for y in y_samples:
        if y == 0:
            raise InputError("sector condition is stated for nonzero y")
        val = phi(y)
        if not val * (y - val / k) > 0:
            return False
    return True


def laplace_numeric(values, dt: float, s: complex) -> complex:
    """Trapezoidal integral of f(t) e^{-st} over the sampled window [0, T].

    `values` are uniform samples with spacing dt starting at t = 0.
    Re(s) must be positive and the window long enough that the discarded
    tail |f(T) e^{-sT}| is below 1e-12.
    """
    f = np.asarray(values, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise InputError("need at least two samples")
    if dt <= 0:
        raise InputError(f"dt must be > 0, got {dt}")
    s = complex(s)
    if s.real <= 0:
        raise InputError(f"Re(s) must be > 0 for convergence, got {s}")
    T = (f.size - 1) * dt
    tail = abs(f[-1] * np.exp(-s * T))
    if tail >= 1e-12:
        raise InputError(
            f"tail not negligible: |f(T) e^(-sT)| = {tail:.3e} at T = {T}"
        )
    t = np.arange(f.size) * dt
    integrand = f * np.exp(-s * t)
    return complex(dt * (integrand.sum() - 0.5 * (integrand[0] + integrand[-1])))
