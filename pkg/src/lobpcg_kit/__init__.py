"""Locally optimal block preconditioned eigensolvers for sparse symmetric
(generalized) problems, with a dense verification oracle, a steepest-descent
baseline, a many-small-blocks variant, and spectral graph bisection."""

__version__ = "0.1.0"

from .blocks import (
    OpCounters,
    RitzSet,
    b_orthonormalize,
    b_project_out,
    rayleigh_quotient,
    rayleigh_ritz,
    residual_block,
)
from .dense import DENSE_CAP, SymEigResult, cholesky, matmul, sym_eig
from .errors import (
    AsymmetricValuesError,
    BadHeaderError,
    DenseCapExceededError,
    DimensionMismatchError,
    DisconnectedGraphError,
    IndexOutOfRangeError,
    InsufficientRankError,
    InvalidConfigError,
    LobpcgKitError,
    MatrixMarketParseError,
    NegativeWeightError,
    NoConvergenceError,
    NonSymmetricDataError,
    NonSymmetricError,
    NotPositiveDefiniteError,
    OrthonormalizationError,
    SelfLoopError,
    UnsupportedFieldError,
    ZeroRankError,
    ZeroVectorError,
)
from .mmio import (
    parse_matrix_market,
    read_dense_matrix_market,
    read_edge_csv,
    write_dense_matrix_market,
    write_edge_csv,
    write_matrix_market_symmetric,
)
from .operators import (
    CallableOperator,
    DiagonalOperator,
    IdentityOperator,
    LinearOperator,
    Preconditioner,
    SparseSymMatrix,
    csr_from_coo,
    exact_inverse_precond,
    identity_precond,
    jacobi_precond,
    laplacian_from_edges,
    op_apply,
)
from .oracle import dense_oracle
from .partition import PartitionResult, partition_graph
from .solver import (
    STATUS_BREAKDOWN,
    STATUS_CONVERGED,
    STATUS_MAX_ITER,
    IterationRecord,
    LobpcgEngine,
    SolveResult,
    SolverConfig,
    lobpcg_solve,
    norm_estimates,
    psd_solve,
)
from .solver2 import Lobpcg2Config, lobpcg2_solve

__all__ = [
    "AsymmetricValuesError",
    "BadHeaderError",
    "CallableOperator",
    "DENSE_CAP",
    "DenseCapExceededError",
    "DiagonalOperator",
    "DimensionMismatchError",
    "DisconnectedGraphError",
    "IdentityOperator",
    "IndexOutOfRangeError",
    "InsufficientRankError",
    "InvalidConfigError",
    "IterationRecord",
    "LinearOperator",
    "Lobpcg2Config",
    "LobpcgEngine",
    "LobpcgKitError",
    "MatrixMarketParseError",
    "NegativeWeightError",
    "NoConvergenceError",
    "NonSymmetricDataError",
    "NonSymmetricError",
    "NotPositiveDefiniteError",
    "OpCounters",
    "OrthonormalizationError",
    "PartitionResult",
    "Preconditioner",
    "RitzSet",
    "STATUS_BREAKDOWN",
    "STATUS_CONVERGED",
    "STATUS_MAX_ITER",
    "SelfLoopError",
    "SolveResult",
    "SolverConfig",
    "SparseSymMatrix",
    "SymEigResult",
    "UnsupportedFieldError",
    "ZeroRankError",
    "ZeroVectorError",
    "b_orthonormalize",
    "b_project_out",
    "cholesky",
    "csr_from_coo",
    "dense_oracle",
    "exact_inverse_precond",
    "identity_precond",
    "jacobi_precond",
    "laplacian_from_edges",
    "lobpcg2_solve",
    "lobpcg_solve",
    "matmul",
    "norm_estimates",
    "op_apply",
    "parse_matrix_market",
    "partition_graph",
    "psd_solve",
    "rayleigh_quotient",
    "rayleigh_ritz",
    "read_dense_matrix_market",
    "read_edge_csv",
    "residual_block",
    "sym_eig",
    "write_dense_matrix_market",
    "write_edge_csv",
    "write_matrix_market_symmetric",
]
