"""Discrete adaptive control allocator.

The allocator distributes a commanded net moment v among redundant actuators
through u = theta_v^T v and adapts theta_v online so that the achieved moment
(the measured B diag(lam) u) converges to v.  Only the measurement is
consumed; the true effectiveness matrix never enters the update.

The update is normalized: with sigma^2 = 1 + lambda_bar * v^T Gamma v and
lambda_bar an upper bound on the largest eigenvalue of B diag(lam) B^T, each
adaptation step is contractive regardless of the size of v.  An internal
state xi accumulates the allocation error and is compared against a stable
reference model xi_m; their difference e = xi - xi_m is the convergence
witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DimensionError, NonFiniteError
from .matrixcore import as_matrix, as_vector, right_pinv, spectral_radius, sym_eig_max, sym_eig_min

OPEN_LOOP = "open_loop"
CLOSED_LOOP = "closed_loop"

GAMMA_SYM_TOL = 1e-12
# spectral radii closer to 1 than this need manual review (unit-circle
# eigenvalue structure is not analysed numerically)
BOUNDARY_BAND = 1e-9


@dataclass(frozen=True)
class AllocatorConfig:
    """Design parameters of the allocator.

    Gamma: r x r symmetric positive-definite adaptation rate.
    A_m: r x r stable reference dynamics.
    l: scalar gain of the closed-loop reference model correction.
    lambda_bar: upper bound for the largest eigenvalue of B diag(lam) B^T;
        defaults to the worst case lambda_max(B B^T), valid because
        effectiveness entries never exceed 1.
    B_alloc: r x m allocation design matrix.
    mode: OPEN_LOOP or CLOSED_LOOP reference model.
    """

    Gamma: np.ndarray
    A_m: np.ndarray
    B_alloc: np.ndarray
    l: float = 0.0
    lambda_bar: float | None = None
    mode: str = CLOSED_LOOP

    def __post_init__(self):
        gamma = as_matrix(self.Gamma, "Gamma")
        a_m = as_matrix(self.A_m, "A_m")
        b = as_matrix(self.B_alloc, "B_alloc")
        r = b.shape[0]
        if gamma.shape != (r, r):
            raise DimensionError(f"Gamma must be {r}x{r}, got {gamma.shape}")
        if a_m.shape != (r, r):
            raise DimensionError(f"A_m must be {r}x{r}, got {a_m.shape}")
        if np.max(np.abs(gamma - gamma.T), initial=0.0) > GAMMA_SYM_TOL:
            raise ConfigError(f"Gamma must be symmetric within {GAMMA_SYM_TOL}")
        if sym_eig_min(gamma) <= 0.0:
            raise ConfigError("Gamma must be positive definite")
        if self.mode not in (OPEN_LOOP, CLOSED_LOOP):
            raise ConfigError(f"mode must be '{OPEN_LOOP}' or '{CLOSED_LOOP}', got {self.mode!r}")
        lam_bar = self.lambda_bar
        if lam_bar is None:
            lam_bar = sym_eig_max(b @ b.T)
        if not lam_bar > 0.0:
            raise ConfigError(f"lambda_bar must be positive, got {lam_bar}")
        object.__setattr__(self, "Gamma", gamma)
        object.__setattr__(self, "A_m", a_m)
        object.__setattr__(self, "B_alloc", b)
        object.__setattr__(self, "l", float(self.l))
        object.__setattr__(self, "lambda_bar", float(lam_bar))

    @property
    def r(self) -> int:
        return self.B_alloc.shape[0]

    @property
    def m(self) -> int:
        return self.B_alloc.shape[1]


@dataclass(frozen=True)
class AllocatorState:
    """Adaptive parameter theta_v (r x m), internal state xi, reference state
    xi_m, and the adaptation step counter k."""

    theta_v: np.ndarray
    xi: np.ndarray
    xi_m: np.ndarray
    k: int = 0


def initial_state(cfg: AllocatorConfig, theta_init: str = "pinv") -> AllocatorState:
    """Fresh state: xi = xi_m = 0 and theta_v from the chosen policy.

    "pinv" starts from the right pseudo-inverse of B_alloc (exact allocation
    while all actuators are healthy); "zero" starts from all zeros.
    """
    if theta_init == "pinv":
        theta = right_pinv(cfg.B_alloc).T
    elif theta_init == "zero":
        theta = np.zeros((cfg.r, cfg.m))
    else:
        raise ConfigError(f"theta_init must be 'pinv' or 'zero', got {theta_init!r}")
    return AllocatorState(theta_v=theta, xi=np.zeros(cfg.r), xi_m=np.zeros(cfg.r), k=0)


def compute_u(state: AllocatorState, v: np.ndarray) -> np.ndarray:
    """Actuator command u = theta_v^T v."""
    v = as_vector(v, "v")
    if v.shape[0] != state.theta_v.shape[0]:
        raise DimensionError(f"v has size {v.shape[0]}, expected {state.theta_v.shape[0]}")
    return state.theta_v.T @ v


def sigma_sq(cfg: AllocatorConfig, v: np.ndarray) -> float:
    """Normalization sigma^2 = 1 + lambda_bar * v^T Gamma v  (always >= 1)."""
    v = as_vector(v, "v")
    return 1.0 + cfg.lambda_bar * float(v @ cfg.Gamma @ v)


def epsilon(cfg: AllocatorConfig, v: np.ndarray, measured: np.ndarray) -> np.ndarray:
    """Normalized allocation error (v - measured) / sigma^2."""
    v = as_vector(v, "v")
    measured = as_vector(measured, "measured")
    if v.shape != measured.shape:
        raise DimensionError(f"v and measured must match, got {v.shape} and {measured.shape}")
    return (v - measured) / sigma_sq(cfg, v)


def update_theta(cfg: AllocatorConfig, state: AllocatorState, v: np.ndarray, eps: np.ndarray) -> AllocatorState:
    """Adaptation step theta_v <- theta_v + Gamma v eps^T B_alloc."""
    v = as_vector(v, "v")
    eps = as_vector(eps, "eps")
    if v.shape != (cfg.r,) or eps.shape != (cfg.r,):
        raise DimensionError(f"v and eps must have size {cfg.r}")
    theta = state.theta_v + np.outer(cfg.Gamma @ v, eps) @ cfg.B_alloc
    if not np.all(np.isfinite(theta)):
        raise NonFiniteError("theta_v update produced NaN/Inf")
    return replace(state, theta_v=theta, k=state.k + 1)


def step_xi(cfg: AllocatorConfig, state: AllocatorState, v: np.ndarray, measured: np.ndarray) -> AllocatorState:
    """Internal dynamics xi <- A_m xi + measured - v."""
    v = as_vector(v, "v")
    measured = as_vector(measured, "measured")
    if v.shape != (cfg.r,) or measured.shape != (cfg.r,):
        raise DimensionError(f"v and measured must have size {cfg.r}")
    return replace(state, xi=cfg.A_m @ state.xi + measured - v)


def step_reference(cfg: AllocatorConfig, state: AllocatorState) -> AllocatorState:
    """Reference model update.

    Open loop: xi_m <- A_m xi_m.  Closed loop: xi_m <- A_m xi_m + l (xi - xi_m),
    i.e. the reference state is pulled toward xi so that the error xi - xi_m
    contracts with A_m - l*I, faster than the open-loop A_m.  Must be fed the
    same-step xi (call it before step_xi).
    """
    if cfg.mode == CLOSED_LOOP:
        xi_m = cfg.A_m @ state.xi_m + cfg.l * (state.xi - state.xi_m)
    else:
        xi_m = cfg.A_m @ state.xi_m
    return replace(state, xi_m=xi_m)


def allocation_error(state: AllocatorState) -> np.ndarray:
    """Convergence witness e = xi - xi_m."""
    return state.xi - state.xi_m


@dataclass(frozen=True)
class ConditionReport:
    name: str
    radius: float
    status: str  # "pass" | "boundary" | "fail"


@dataclass(frozen=True)
class Assumption1Report:
    """Spectral-radius stability checks on the reference dynamics."""

    conditions: tuple[ConditionReport, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.conditions)

    def summary(self) -> str:
        lines = []
        for c in self.conditions:
            tag = {"pass": "PASS", "boundary": "BOUNDARY - manual review", "fail": "FAIL"}[c.status]
            lines.append(f"rho({c.name}) = {c.radius:.6g}: {tag}")
        return "\n".join(lines)


def _classify(radius: float) -> str:
    if radius < 1.0 - BOUNDARY_BAND:
        return "pass"
    if radius <= 1.0:
        return "boundary"
    return "fail"


def check_assumption1(cfg: AllocatorConfig) -> Assumption1Report:
    """Verify that the reference dynamics are strictly stable.

    Checks rho(A_m) and, in closed-loop mode, rho(A_m + l I) and
    rho(A_m - l I) as well: l must keep both the shifted reference dynamics
    and the error dynamics inside the unit circle.  Radii within 1e-9 of the
    unit circle are flagged for manual review instead of passing, since
    boundary eigenvalue structure is not analysed.
    """
    matrices = [("A_m", cfg.A_m)]
    if cfg.mode == CLOSED_LOOP:
        eye = np.eye(cfg.r)
        matrices.append(("A_m + l*I", cfg.A_m + cfg.l * eye))
        matrices.append(("A_m - l*I", cfg.A_m - cfg.l * eye))
    conditions = []
    for name, mat in matrices:
        rho = spectral_radius(mat)
        conditions.append(ConditionReport(name=name, radius=rho, status=_classify(rho)))
    return Assumption1Report(conditions=tuple(conditions))
