"""Small dense linear-algebra kernel.

Everything in this package works on matrices no larger than ~16x16, so the
routines here favour determinism and explicit failure over asymptotic speed.
Matrices are plain 2-D ``numpy.ndarray`` (row-major); vectors are 1-D arrays.
NaN/Inf are rejected on the way in and on the way out.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, DimensionError, NonFiniteError, SingularMatrixError

PIVOT_TOL = 1e-12
SYM_TOL = 1e-10


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{name} contains NaN/Inf")
    return m


def as_vector(a, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float array."""
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(f"{name} contains NaN/Inf")
    return v


def _check_finite_result(m: np.ndarray, op: str) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(f"{op} produced NaN/Inf")
    return m


def multiply(a, b) -> np.ndarray:
    """Matrix product a @ b with explicit shape and finiteness checks."""
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return _check_finite_result(a @ b, "multiply")


def inverse(m) -> np.ndarray:
    """Invert a square matrix by Gauss-Jordan elimination with partial pivoting.

    Raises SingularMatrixError when the best available pivot falls below
    PIVOT_TOL (1e-12).
    """
    m = as_matrix(m, "m")
    n, c = m.shape
    if n != c:
        raise DimensionError(f"inverse needs a square matrix, got {m.shape}")
    aug = np.hstack([m.copy(), np.eye(n)])
    for i in range(n):
        pivot_row = i + int(np.argmax(np.abs(aug[i:, i])))
        if abs(aug[pivot_row, i]) < PIVOT_TOL:
            raise SingularMatrixError(f"singular matrix: pivot {aug[pivot_row, i]:.3e} below {PIVOT_TOL}")
        if pivot_row != i:
            aug[[i, pivot_row]] = aug[[pivot_row, i]]
        aug[i] /= aug[i, i]
        for k in range(n):
            if k != i and aug[k, i] != 0.0:
                aug[k] -= aug[k, i] * aug[i]
    return _check_finite_result(aug[:, n:], "inverse")


def right_pinv(m) -> np.ndarray:
    """Right pseudo-inverse M^T (M M^T)^-1 of a full-row-rank matrix.

    Satisfies m @ right_pinv(m) == I to ~1e-10 for well-conditioned input.
    """
    m = as_matrix(m, "m")
    gram = m @ m.T
    try:
        gram_inv = inverse(gram)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"matrix is not full row rank: {exc}") from exc
    return _check_finite_result(m.T @ gram_inv, "right_pinv")


def _sym_eigvals(s) -> np.ndarray:
    s = as_matrix(s, "s")
    n, c = s.shape
    if n != c:
        raise DimensionError(f"symmetric eigenvalues need a square matrix, got {s.shape}")
    if np.max(np.abs(s - s.T), initial=0.0) > SYM_TOL:
        raise DimensionError(f"matrix is not symmetric within {SYM_TOL}")
    s = 0.5 * (s + s.T)
    try:
        return np.linalg.eigvalsh(s)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"symmetric eigenvalue iteration failed: {exc}") from exc


def sym_eig_max(s) -> float:
    """Largest eigenvalue of a symmetric matrix (symmetrized by averaging)."""
    return float(_sym_eigvals(s)[-1])


def sym_eig_min(s) -> float:
    """Smallest eigenvalue of a symmetric matrix (symmetrized by averaging)."""
    return float(_sym_eigvals(s)[0])


def spectral_radius(m) -> float:
    """max |lambda_i(m)| for a square matrix."""
    m = as_matrix(m, "m")
    n, c = m.shape
    if n != c:
        raise DimensionError(f"spectral radius needs a square matrix, got {m.shape}")
    try:
        eigs = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(np.abs(eigs))) if n else 0.0
