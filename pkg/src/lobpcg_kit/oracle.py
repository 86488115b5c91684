"""Brute-force dense reference eigensolver for generalized problems.

The tests and the acceptance suite compare every iterative result against
this: densify both operators, reduce A x = lambda B x to standard form
through a Cholesky factor of B, and diagonalize.
"""

from __future__ import annotations

import numpy as np

from .blocks import fix_signs
from .dense import DENSE_CAP, SymEigResult, cholesky, sym_eig
from .errors import DenseCapExceededError, DimensionMismatchError
from .operators import LinearOperator


def dense_oracle(a_op: LinearOperator, b_op: LinearOperator) -> SymEigResult:
    """All eigenpairs of the pencil (A, B), ascending, B-orthonormal vectors.

    Densification goes through identity-block application, so any operator
    kind works, including matrix-free test operators.  B must be SPD
    (NotPositiveDefiniteError otherwise); the dimension is capped at
    :data:`~lobpcg_kit.dense.DENSE_CAP`.
    """
    if a_op.dim != b_op.dim:
        raise DimensionMismatchError(
            f"operator dimensions disagree: {a_op.dim} vs {b_op.dim}"
        )
    if a_op.dim > DENSE_CAP:
        raise DenseCapExceededError(
            f"dimension {a_op.dim} exceeds dense cap {DENSE_CAP}"
        )
    a_mat = a_op.to_dense()
    a_mat = 0.5 * (a_mat + a_mat.T)
    b_mat = b_op.to_dense()
    b_mat = 0.5 * (b_mat + b_mat.T)
    lower = cholesky(b_mat)
    half = np.linalg.solve(lower, a_mat)
    reduced = np.linalg.solve(lower, half.T).T
    eig = sym_eig(0.5 * (reduced + reduced.T))
    vectors = np.linalg.solve(lower.T, eig.vectors)
    fix_signs(vectors)
    return SymEigResult(values=eig.values, vectors=vectors)
