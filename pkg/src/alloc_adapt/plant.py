"""Discrete LTI plant with actuator-effectiveness degradation.

The plant integrates x(k+1) = A x(k) + B_u diag(lam) u(k) with the full input
matrix B_u.  The allocator never sees B_u; it works with the factorized
design pair (B_v, B) where B_v @ B is the allocation design matrix, and with
the measured net moment B diag(lam) u (an ideal IMU-style measurement,
noise- and delay-free).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NonFiniteError, SingularMatrixError
from .matrixcore import as_matrix, as_vector, inverse


@dataclass(frozen=True)
class Effectiveness:
    """Diagonal actuator-effectiveness factors, each in (0, 1]."""

    lambda_diag: np.ndarray

    def __post_init__(self):
        lam = as_vector(self.lambda_diag, "lambda_diag")
        if np.any(lam <= 0.0) or np.any(lam > 1.0):
            raise ValueError(f"effectiveness entries must lie in (0, 1], got {lam}")
        object.__setattr__(self, "lambda_diag", lam)

    @classmethod
    def healthy(cls, m: int) -> "Effectiveness":
        return cls(np.ones(m))

    @classmethod
    def uniform(cls, m: int, level: float) -> "Effectiveness":
        return cls(np.full(m, float(level)))

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.lambda_diag)


@dataclass(frozen=True)
class PlantModel:
    """Discrete plant matrices plus the allocation factorization.

    A: n x n, B_u: n x m, B_v: n x r, B: r x m, C: r x n, dt > 0.
    rank(B_v) = rank(B) = r < m is required (checked through Gram-matrix
    nonsingularity).
    """

    A: np.ndarray
    B_u: np.ndarray
    B_v: np.ndarray
    B: np.ndarray
    C: np.ndarray
    dt: float
    state_labels: tuple[str, ...] = field(default=())
    input_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        B_u = as_matrix(self.B_u, "B_u")
        B_v = as_matrix(self.B_v, "B_v")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionError(f"A must be square, got {A.shape}")
        m = B_u.shape[1]
        r = B.shape[0]
        if B_u.shape != (n, m):
            raise DimensionError(f"B_u must be {n}x{m}, got {B_u.shape}")
        if B_v.shape != (n, r):
            raise DimensionError(f"B_v must be {n}x{r}, got {B_v.shape}")
        if B.shape != (r, m):
            raise DimensionError(f"B must be {r}x{m}, got {B.shape}")
        if C.shape != (r, n):
            raise DimensionError(f"C must be {r}x{n}, got {C.shape}")
        if not r < m:
            raise DimensionError(f"over-actuation requires r < m, got r={r}, m={m}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        # full-rank checks via Gram nonsingularity
        for name, g in (("B", B @ B.T), ("B_v", B_v.T @ B_v)):
            try:
                inverse(g)
            except SingularMatrixError as exc:
                raise SingularMatrixError(f"{name} is rank deficient: {exc}") from exc
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B_u", B_u)
        object.__setattr__(self, "B_v", B_v)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "dt", float(self.dt))
        if not self.state_labels:
            object.__setattr__(self, "state_labels", tuple(f"x{i + 1}" for i in range(n)))
        if not self.input_labels:
            object.__setattr__(self, "input_labels", tuple(f"u_{j + 1}" for j in range(m)))
        if len(self.state_labels) != n or len(self.input_labels) != m:
            raise DimensionError("label count does not match dimensions")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B_u.shape[1]

    @property
    def r(self) -> int:
        return self.B.shape[0]


def step(model: PlantModel, lam: Effectiveness, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """One plant update: A x + B_u diag(lam) u.

    Uses the full B_u; the zeroed-row design matrix only enters the allocator.
    """
    x = as_vector(x, "x")
    u = as_vector(u, "u")
    if x.shape != (model.n,) or u.shape != (model.m,):
        raise DimensionError(f"expected x of size {model.n} and u of size {model.m}, got {x.shape} and {u.shape}")
    x_next = model.A @ x + model.B_u @ (lam.lambda_diag * u)
    if not np.all(np.isfinite(x_next)):
        raise NonFiniteError("plant step produced NaN/Inf")
    return x_next


def measured_moment(model: PlantModel, lam: Effectiveness, u: np.ndarray) -> np.ndarray:
    """Net moment B diag(lam) u actually produced by the (degraded) actuators."""
    u = as_vector(u, "u")
    if u.shape != (model.m,):
        raise DimensionError(f"expected u of size {model.m}, got {u.shape}")
    return model.B @ (lam.lambda_diag * u)


# ADMIRE fighter model, linearized at Mach 0.22 / 3 km and discretized at 0.1 s.
# States: angle of attack, sideslip, roll/pitch/yaw rate.  Inputs: canards,
# right/left elevons, rudder.
_ADMIRE_A = np.array([
    [1.0214, 0.0054, 0.0003, 0.4176, -0.0013],
    [0.0, 0.6307, 0.0821, 0.0, -0.3792],
    [0.0, -3.4485, 0.3979, 0.0, 1.1569],
    [1.1199, 0.0024, 0.0001, 1.0374, -0.0003],
    [0.0, 0.3802, -0.0156, 0.0, 0.8062],
])
_ADMIRE_B_U = np.array([
    [0.1823, -0.1798, -0.1795, 0.0008],
    [0.0, -0.0639, 0.0639, 0.1396],
    [0.0, -1.584, 1.584, 0.2937],
    [0.8075, -0.6456, -0.6456, 0.0013],
    [0.0, -0.1005, 0.1005, -0.4113],
])
_ADMIRE_DT = 0.1


def admire_preset() -> PlantModel:
    """The built-in ADMIRE benchmark plant (n=5, m=4, r=3).

    The allocation design treats the surfaces as pure moment generators:
    B keeps only the p/q/r rows of B_u and B_v selects those rows, so
    B_v @ B equals B_u with its first two rows zeroed.  C reads out p, q, r.
    """
    b = _ADMIRE_B_U[2:, :].copy()
    b_v = np.vstack([np.zeros((2, 3)), np.eye(3)])
    c = np.hstack([np.zeros((3, 2)), np.eye(3)])
    return PlantModel(
        A=_ADMIRE_A.copy(),
        B_u=_ADMIRE_B_U.copy(),
        B_v=b_v,
        B=b,
        C=c,
        dt=_ADMIRE_DT,
        state_labels=("alpha", "beta", "p", "q", "r"),
        input_labels=("u_c", "u_re", "u_le", "u_r"),
    )
