"""Outer-loop discrete LQR with integral action.

The plant state is augmented with the integrated tracking error so that the
standard infinite-horizon discrete LQR yields zero steady-state error for
piecewise-constant references.  The Riccati solution is found by fixed-point
iteration, which converges quickly at the ~8x8 scale used here.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError, DimensionError
from .matrixcore import as_matrix, as_vector, inverse, sym_eig_min

log = logging.getLogger(__name__)

DARE_TOL = 1e-12
DARE_MAX_ITER = 100_000
_DIVERGENCE_CAP = 1e100


@dataclass(frozen=True)
class AugmentedSystem:
    """Block system [[A, 0], [-dt*C, I]] with input [B_v; 0] and reference
    injection [0; dt*I]."""

    A_bar: np.ndarray
    B_bar: np.ndarray
    E_bar: np.ndarray
    n: int
    r: int


def build_augmented(A, B_v, C, dt: float) -> AugmentedSystem:
    """Augment the plant with integrated tracking-error states."""
    A = as_matrix(A, "A")
    B_v = as_matrix(B_v, "B_v")
    C = as_matrix(C, "C")
    n = A.shape[0]
    r = B_v.shape[1]
    if A.shape != (n, n) or B_v.shape != (n, r) or C.shape != (r, n):
        raise DimensionError(f"inconsistent shapes A={A.shape}, B_v={B_v.shape}, C={C.shape}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    a_bar = np.block([[A, np.zeros((n, r))], [-dt * C, np.eye(r)]])
    b_bar = np.vstack([B_v, np.zeros((r, r))])
    e_bar = np.vstack([np.zeros((n, r)), dt * np.eye(r)])
    return AugmentedSystem(A_bar=a_bar, B_bar=b_bar, E_bar=e_bar, n=n, r=r)


@dataclass(frozen=True)
class LqrSolution:
    """Fixed point P of the Riccati recursion and the gain K it induces."""

    P: np.ndarray
    K: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    iterations: int
    residual: float


def _riccati_rhs(A: np.ndarray, B: np.ndarray, Q: np.ndarray, R: np.ndarray, P: np.ndarray) -> np.ndarray:
    bpb = R + B.T @ P @ B
    gain = inverse(bpb) @ (B.T @ P @ A)
    return Q + A.T @ P @ A - A.T @ P @ B @ gain


def solve_dare(A_bar, B_bar, Q, R, tol: float = DARE_TOL, max_iter: int = DARE_MAX_ITER) -> LqrSolution:
    """Solve the discrete algebraic Riccati equation by fixed-point iteration.

    Starting from P = Q, iterates
        P <- Q + A^T P A - A^T P B (R + B^T P B)^-1 B^T P A
    until the max-abs change drops below tol.  Divergence or hitting the
    iteration cap signals a non-stabilizable pair (or ill-conditioning) and
    raises ConvergenceError.
    """
    A = as_matrix(A_bar, "A_bar")
    B = as_matrix(B_bar, "B_bar")
    Q = as_matrix(Q, "Q")
    R = as_matrix(R, "R")
    n = A.shape[0]
    if A.shape != (n, n) or B.shape[0] != n or Q.shape != (n, n):
        raise DimensionError(f"inconsistent shapes A={A.shape}, B={B.shape}, Q={Q.shape}")
    rdim = B.shape[1]
    if R.shape != (rdim, rdim):
        raise DimensionError(f"R must be {rdim}x{rdim}, got {R.shape}")
    if np.max(np.abs(Q - Q.T), initial=0.0) > 1e-10 or np.max(np.abs(R - R.T), initial=0.0) > 1e-10:
        raise ConfigError("Q and R must be symmetric")
    if sym_eig_min(Q) < -1e-12:
        raise ConfigError("Q must be positive semi-definite")
    if sym_eig_min(R) <= 0.0:
        raise ConfigError("R must be positive definite")

    p = Q.copy()
    for it in range(1, max_iter + 1):
        p_next = _riccati_rhs(A, B, Q, R, p)
        p_next = 0.5 * (p_next + p_next.T)
        delta = float(np.max(np.abs(p_next - p)))
        p = p_next
        if np.max(np.abs(p)) > _DIVERGENCE_CAP:
            raise ConvergenceError(f"Riccati iteration diverged at iteration {it} (non-stabilizable pair?)")
        if delta < tol:
            k = inverse(R + B.T @ p @ B) @ (B.T @ p @ A)
            residual = float(np.max(np.abs(p - _riccati_rhs(A, B, Q, R, p))))
            log.debug("DARE converged in %d iterations, residual %.3e", it, residual)
            return LqrSolution(P=p, K=k, Q=Q, R=R, iterations=it, residual=residual)
    raise ConvergenceError(f"Riccati iteration did not converge within {max_iter} iterations")


def control(sol: LqrSolution, z: np.ndarray, limits: np.ndarray | None = None) -> np.ndarray:
    """State feedback v = -K z, soft-saturated when limits are given."""
    z = as_vector(z, "z")
    if z.shape[0] != sol.K.shape[1]:
        raise DimensionError(f"z has size {z.shape[0]}, expected {sol.K.shape[1]}")
    v = -sol.K @ z
    if limits is not None:
        v = soft_saturate(v, limits)
    return v


def integrator_step(x_new: np.ndarray, ref: np.ndarray, y: np.ndarray, dt: float) -> np.ndarray:
    """Accumulate tracking error: x_new + dt * (ref - y)."""
    x_new = as_vector(x_new, "x_new")
    ref = as_vector(ref, "ref")
    y = as_vector(y, "y")
    if not (x_new.shape == ref.shape == y.shape):
        raise DimensionError(f"shape mismatch: {x_new.shape}, {ref.shape}, {y.shape}")
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    return x_new + dt * (ref - y)


def soft_saturate(v: np.ndarray, limit) -> np.ndarray:
    """Smooth componentwise saturation limit_i * tanh(v_i / limit_i)."""
    v = as_vector(v, "v")
    lim = np.broadcast_to(np.asarray(limit, dtype=float), v.shape)
    if np.any(lim <= 0.0):
        raise ValueError("saturation limits must be positive")
    return lim * np.tanh(v / lim)
