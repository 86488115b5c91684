"""Small dense kernels: symmetric eigendecomposition, Cholesky, products.

These back the Rayleigh-Ritz projection step and the dense verification
oracle.  Matrices are plain float64 ``numpy.ndarray`` objects of shape
``(rows, cols)``; only indexing semantics matter, storage order is numpy's
business.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DenseCapExceededError,
    DimensionMismatchError,
    NoConvergenceError,
    NonSymmetricError,
    NotPositiveDefiniteError,
)

#: Largest dimension the dense kernels accept.
DENSE_CAP = 2000

#: Relative symmetry slack: |M - M.T| <= SYM_RTOL * max(1, max|M|).
SYM_RTOL = 1e-12

#: Cholesky pivot threshold factor: pivot <= n * PIVOT_RTOL * max|M| fails.
PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class SymEigResult:
    """All eigenpairs of a symmetric matrix, eigenvalues ascending.

    ``vectors[:, k]`` is the unit eigenvector for ``values[k]``.  For
    degenerate eigenvalues only the spanned invariant subspace is
    meaningful, not the individual columns.
    """

    values: np.ndarray
    vectors: np.ndarray


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatchError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def require_symmetric(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Validate the symmetry contract and return the input as float64."""
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NonSymmetricError(f"{what} is not square: shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    skew = float(np.max(np.abs(m - m.T)))
    if skew > SYM_RTOL * scale:
        raise NonSymmetricError(
            f"{what} fails symmetry check: max|M - M.T| = {skew:.3e} > {SYM_RTOL * scale:.3e}"
        )
    return m


def sym_eig(m: np.ndarray) -> SymEigResult:
    """Full eigendecomposition of a symmetric matrix, values ascending.

    Ties keep the kernel's internal ordering (no secondary sort key).
    Deterministic for a fixed input.
    """
    m = require_symmetric(m)
    n = m.shape[0]
    if n > DENSE_CAP:
        raise DenseCapExceededError(f"dimension {n} exceeds dense cap {DENSE_CAP}")
    # Work on the exactly symmetrized matrix so the decomposition is
    # independent of which triangle LAPACK reads.
    sym = 0.5 * (m + m.T)
    try:
        values, vectors = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # defect signal, see module tests
        raise NoConvergenceError(f"eigendecomposition did not converge: {exc}") from exc
    return SymEigResult(values=values, vectors=vectors)


def cholesky(m: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^T = M and strictly positive diagonal.

    Raises NotPositiveDefiniteError when a pivot falls at or below
    ``n * 1e-14 * max|M|``; callers treat that as a rank-deficiency signal
    and switch to their eigendecomposition-based fallback.
    """
    m = require_symmetric(m)
    n = m.shape[0]
    if n > DENSE_CAP:
        raise DenseCapExceededError(f"dimension {n} exceeds dense cap {DENSE_CAP}")
    pivot_floor = n * PIVOT_RTOL * float(np.max(np.abs(m)))
    lower = np.zeros_like(m)
    for j in range(n):
        pivot = m[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot <= pivot_floor:
            raise NotPositiveDefiniteError(
                f"pivot {pivot:.3e} at column {j} is below threshold {pivot_floor:.3e}"
            )
        diag = np.sqrt(pivot)
        lower[j, j] = diag
        if j + 1 < n:
            lower[j + 1 :, j] = (m[j + 1 :, j] - lower[j + 1 :, :j] @ lower[j, :j]) / diag
    return lower


def matmul(a: np.ndarray, b: np.ndarray, *, transpose_a: bool = False) -> np.ndarray:
    """Matrix product (optionally A^T B), accumulated in double precision."""
    a = _as_matrix(a)
    b = _as_matrix(b)
    left = a.T if transpose_a else a
    if left.shape[1] != b.shape[0]:
        raise DimensionMismatchError(
            f"inner dimensions disagree: {left.shape} x {b.shape}"
        )
    return left @ b
