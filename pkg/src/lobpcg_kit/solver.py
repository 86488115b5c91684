"""Blocked locally optimal eigensolver with preconditioning and soft locking.

The iteration keeps a B-orthonormal block of Ritz vectors, augments it
with preconditioned residuals and an implicitly recurred previous-direction
block, and re-extracts the smallest Ritz pairs each step.  A steepest
descent variant (no previous-direction block) is provided as a baseline.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from .blocks import (
    OpCounters,
    b_orthonormalize_full,
    b_project_out,
    rayleigh_ritz,
    residual_block,
)
from .dense import sym_eig
from .errors import (
    DimensionMismatchError,
    InsufficientRankError,
    InvalidConfigError,
    OrthonormalizationError,
    ZeroRankError,
)
from .operators import (
    IdentityOperator,
    LinearOperator,
    Preconditioner,
    identity_precond,
    op_apply,
)

STATUS_CONVERGED = "converged"
STATUS_MAX_ITER = "max_iter"
STATUS_BREAKDOWN = "breakdown"


@dataclass
class SolverConfig:
    """Knobs for the blocked solver.

    ``block_size`` defaults to ``nev``; it may not exceed ceil(dim / 4) so
    the three-block trial basis keeps a plausible rank (violations raise,
    they are never clamped).  ``locking`` is ``soft`` (converged columns
    stay in the basis but stop generating search directions) or ``none``.
    """

    nev: int
    block_size: int | None = None
    tol: float = 1e-8
    max_iter: int = 500
    seed: int = 0
    locking: str = "soft"
    restart_cond_limit: float = 1e12
    record_history: bool = False

    def resolved_block_size(self) -> int:
        return self.nev if self.block_size is None else self.block_size

    def validate(self, dim: int) -> None:
        bs = self.resolved_block_size()
        if not 1 <= self.nev <= bs:
            raise InvalidConfigError(f"need 1 <= nev <= block_size, got {self.nev}, {bs}")
        if bs > math.ceil(dim / 4):
            raise InvalidConfigError(
                f"block_size {bs} exceeds ceil(dim / 4) = {math.ceil(dim / 4)} for dim {dim}"
            )
        if not self.tol > 0:
            raise InvalidConfigError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise InvalidConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.locking not in ("soft", "none"):
            raise InvalidConfigError(f"unknown locking policy {self.locking!r}")
        if not self.restart_cond_limit > 0:
            raise InvalidConfigError("restart_cond_limit must be positive")


@dataclass
class IterationRecord:
    """Observability snapshot of one solver state."""

    iteration: int
    ritz_values: np.ndarray
    residual_norms: np.ndarray
    locked_count: int
    #: Number of columns that entered the Rayleigh-Ritz step which
    #: produced this state (block_size for the initial state).
    basis_cols: int


@dataclass
class SolveResult:
    """Final Ritz pairs plus run diagnostics.

    ``iterations`` counts subspace-update steps actually performed, so a
    start that is already converged reports 0.  ``vectors`` holds the
    ``nev`` B-orthonormal Ritz vectors even for ``max_iter``/``breakdown``
    outcomes (best so far, never discarded).
    """

    values: np.ndarray
    vectors: np.ndarray
    status: str
    iterations: int
    residual_norms: np.ndarray
    history: list[IterationRecord] = field(default_factory=list)
    counters: OpCounters = field(default_factory=OpCounters)


class _CountingOperator(LinearOperator):
    """Transparent wrapper tallying column applications."""

    def __init__(self, inner: LinearOperator, counters: OpCounters):
        super().__init__(inner.dim)
        self.kind = inner.kind
        self._inner = inner
        self._counters = counters

    def apply(self, block: np.ndarray) -> np.ndarray:
        self._counters.matvecs += block.shape[1] if block.ndim == 2 else 1
        return self._inner.apply(block)


class _CountingPrecond:
    def __init__(self, inner: Preconditioner, counters: OpCounters):
        self.dim = inner.dim
        self.kind = inner.kind
        self._inner = inner
        self._counters = counters

    def apply(self, block: np.ndarray) -> np.ndarray:
        self._counters.precond_applies += block.shape[1] if block.ndim == 2 else 1
        return self._inner.apply(block)


def norm_estimates(op: LinearOperator) -> float:
    """Cheap 2-norm estimate: max row 1-norm for sparse kinds, a short
    deterministic power iteration for matrix-free ones.

    Guaranteed within a factor of the dimension of the true 2-norm.
    """
    if op.kind == "identity":
        return 1.0
    if op.kind == "diagonal":
        return float(np.max(np.abs(op.diagonal_values)))
    if op.kind == "sparse_sym":
        return op.max_row_l1()
    rng = np.random.default_rng(1905)
    vec = rng.standard_normal((op.dim, 1))
    vec /= np.linalg.norm(vec)
    estimate = 0.0
    for _ in range(10):
        nxt = op.apply(vec)
        estimate = float(np.linalg.norm(nxt))
        if estimate == 0.0:
            return 0.0
        vec = nxt / estimate
    return estimate


class _Breakdown(Exception):
    """Internal signal: no usable search directions remain."""


class LobpcgEngine:
    """Stepping core shared by :func:`lobpcg_solve` and :func:`psd_solve`.

    Exposed so tests can drive individual update steps and compare a
    three-block step against a steepest-descent step from an identical
    state.  Regular callers should use the solve functions.
    """

    def __init__(self, a_op: LinearOperator, cfg: SolverConfig, *,
                 b_op: LinearOperator | None = None,
                 precond: Preconditioner | None = None,
                 x0: np.ndarray | None = None,
                 constraints: np.ndarray | None = None,
                 use_history_direction: bool = True):
        b_op = b_op if b_op is not None else IdentityOperator(a_op.dim)
        if a_op.dim != b_op.dim:
            raise DimensionMismatchError(
                f"operator dimensions disagree: {a_op.dim} vs {b_op.dim}"
            )
        cfg.validate(a_op.dim)
        self.cfg = cfg
        self.dim = a_op.dim
        self.block_size = cfg.resolved_block_size()
        self.counters = OpCounters()
        self.norm_a = norm_estimates(a_op)
        self.norm_b = norm_estimates(b_op)
        self.a_op = _CountingOperator(a_op, self.counters)
        self.b_op = _CountingOperator(b_op, self.counters)
        raw_precond = precond if precond is not None else identity_precond(a_op.dim)
        if raw_precond.dim != a_op.dim:
            raise DimensionMismatchError(
                f"preconditioner dimension {raw_precond.dim} does not match {a_op.dim}"
            )
        self.precond = _CountingPrecond(raw_precond, self.counters)
        self.use_history_direction = use_history_direction

        self._rng = np.random.default_rng(cfg.seed)
        if constraints is not None:
            constraints = np.asarray(constraints, dtype=float)
            if constraints.ndim == 1:
                constraints = constraints[:, None]
            self.constraints, _, _ = b_orthonormalize_full(
                constraints, self.b_op, self.counters
            )
            self.b_constraints = op_apply(self.b_op, self.constraints)
        else:
            self.constraints = None
            self.b_constraints = None

        if x0 is not None:
            x0 = np.asarray(x0, dtype=float)
            if x0.shape != (self.dim, self.block_size):
                raise DimensionMismatchError(
                    f"x0 must be ({self.dim}, {self.block_size}), got {x0.shape}"
                )
            if not np.all(np.isfinite(x0)):
                raise InvalidConfigError("x0 contains non-finite entries")
            start = x0.copy()
        else:
            start = self._rng.standard_normal((self.dim, self.block_size))
        start = self._full_rank_start(start)

        first = rayleigh_ritz(start, self.a_op, self.b_op, self.block_size, self.counters)
        self.X = first.vectors
        self.ritz_values = first.values
        self.P: np.ndarray | None = None
        self.iterations = 0
        self.n_locked = 0
        self.history: list[IterationRecord] = []
        self._last_basis_cols = self.block_size
        self._refresh_residuals()

    # -- setup helpers -------------------------------------------------

    def _deflate(self, block: np.ndarray) -> np.ndarray:
        if self.constraints is None:
            return block
        return b_project_out(block, self.constraints, self.b_constraints)

    def _full_rank_start(self, start: np.ndarray) -> np.ndarray:
        """Deflate, orthonormalize, and pad a start block up to full rank."""
        for _ in range(3):
            candidate = self._deflate(start)
            try:
                ortho, _, _ = b_orthonormalize_full(candidate, self.b_op, self.counters)
            except ZeroRankError:
                ortho = np.zeros((self.dim, 0))
            if ortho.shape[1] >= self.block_size:
                return ortho
            pad = self._rng.standard_normal((self.dim, self.block_size - ortho.shape[1]))
            start = np.hstack([ortho, pad])
        raise InsufficientRankError(
            f"could not build a rank-{self.block_size} start block"
        )

    # -- state inspection ----------------------------------------------

    def _refresh_residuals(self) -> None:
        self.R = residual_block(self.a_op, self.b_op, self.X, self.ritz_values)
        self.residual_norms = np.linalg.norm(self.R, axis=0)

    def convergence_thresholds(self) -> np.ndarray:
        scale = self.norm_a + np.abs(self.ritz_values) * self.norm_b
        return self.cfg.tol * scale * np.linalg.norm(self.X, axis=0)

    def converged_mask(self) -> np.ndarray:
        return self.residual_norms <= self.convergence_thresholds()

    def _record(self) -> None:
        if self.cfg.record_history:
            self.history.append(IterationRecord(
                iteration=self.iterations,
                ritz_values=self.ritz_values.copy(),
                residual_norms=self.residual_norms.copy(),
                locked_count=self.n_locked,
                basis_cols=self._last_basis_cols,
            ))

    def fork(self) -> "LobpcgEngine":
        """Independent deep copy, for comparing steps from one state."""
        return copy.deepcopy(self)

    # -- the update step -------------------------------------------------

    def step(self, use_previous: bool | None = None) -> None:
        """One locally optimal update of the iterate block.

        ``use_previous`` overrides the engine's direction mode for this
        single step (the steepest-descent comparison hook).  Raises the
        internal breakdown signal when no search directions survive.
        """
        include_p = self.use_history_direction if use_previous is None else use_previous
        conv = self.converged_mask()
        if self.cfg.locking == "soft":
            active = np.flatnonzero(~conv)
        else:
            active = np.arange(self.block_size)
        if active.size == 0:
            active = np.arange(self.block_size)

        b_x = op_apply(self.b_op, self.X)
        directions = self.precond.apply(self.R[:, active])
        directions = self._deflate(directions)
        directions = b_project_out(directions, self.X, b_x)
        try:
            w_block, _, _ = b_orthonormalize_full(directions, self.b_op, self.counters)
        except ZeroRankError:
            raise _Breakdown from None

        p_block = None
        if include_p and self.P is not None:
            carried = b_project_out(self._deflate(self.P), self.X, b_x)
            try:
                p_block, _, _ = b_orthonormalize_full(carried, self.b_op, self.counters)
            except ZeroRankError:
                p_block = None

        basis = self._assemble_basis(w_block, p_block)
        try:
            ritz = rayleigh_ritz(basis, self.a_op, self.b_op, self.block_size,
                                 self.counters)
        except InsufficientRankError:
            if p_block is None:
                raise _Breakdown from None
            basis = self._assemble_basis(w_block, None)
            try:
                ritz = rayleigh_ritz(basis, self.a_op, self.b_op, self.block_size,
                                     self.counters)
            except InsufficientRankError:
                raise _Breakdown from None

        tail = basis[:, self.block_size:]
        tail_coeff = ritz.coefficients[self.block_size:, :]
        new_p = None
        if include_p and tail.shape[1]:
            try:
                new_p, _, _ = b_orthonormalize_full(tail @ tail_coeff, self.b_op,
                                                    self.counters)
            except ZeroRankError:
                new_p = None

        self.X = ritz.vectors
        self.ritz_values = ritz.values
        self.P = new_p
        self.iterations += 1
        self._last_basis_cols = basis.shape[1]
        self._refresh_residuals()

    def _assemble_basis(self, w_block: np.ndarray, p_block: np.ndarray | None) -> np.ndarray:
        if p_block is None:
            return np.hstack([self.X, w_block])
        basis = np.hstack([self.X, w_block, p_block])
        # Condition guard on the joint Gram matrix: drop the carried
        # directions for this step when the basis degenerates.
        gram = basis.T @ op_apply(self.b_op, basis)
        eigvals = sym_eig(0.5 * (gram + gram.T)).values
        lam_min, lam_max = float(eigvals[0]), float(eigvals[-1])
        if lam_min <= 0.0 or lam_max / lam_min > self.cfg.restart_cond_limit:
            return np.hstack([self.X, w_block])
        return basis

    # -- driver ----------------------------------------------------------

    def run(self) -> SolveResult:
        nev = self.cfg.nev
        status = None
        while status is None:
            conv = self.converged_mask()
            if self.cfg.locking == "soft":
                prefix = 0
                while prefix < self.block_size and conv[prefix]:
                    prefix += 1
                self.n_locked = max(self.n_locked, prefix)
            self._record()
            if np.all(conv[:nev]):
                status = STATUS_CONVERGED
            elif self.iterations >= self.cfg.max_iter:
                status = STATUS_MAX_ITER
            else:
                try:
                    self.step()
                except (_Breakdown, OrthonormalizationError):
                    # the step mutates state only once fully assembled, so
                    # the best-so-far pairs are intact here
                    status = STATUS_BREAKDOWN
        return SolveResult(
            values=self.ritz_values[:nev].copy(),
            vectors=self.X[:, :nev].copy(),
            status=status,
            iterations=self.iterations,
            residual_norms=self.residual_norms[:nev].copy(),
            history=self.history,
            counters=self.counters,
        )


def lobpcg_solve(a_op: LinearOperator, cfg: SolverConfig, *,
                 b_op: LinearOperator | None = None,
                 precond: Preconditioner | None = None,
                 x0: np.ndarray | None = None,
                 constraints: np.ndarray | None = None) -> SolveResult:
    """Smallest ``cfg.nev`` eigenpairs of A x = lambda B x.

    B defaults to the identity metric and ``precond`` to none.  ``x0``
    (block_size columns) enables warm starts; ``constraints`` columns are
    known eigenvectors deflated from all search directions.  Breakdown is
    reported through ``result.status``, never raised.
    """
    engine = LobpcgEngine(a_op, cfg, b_op=b_op, precond=precond, x0=x0,
                          constraints=constraints, use_history_direction=True)
    return engine.run()


def psd_solve(a_op: LinearOperator, cfg: SolverConfig, *,
              b_op: LinearOperator | None = None,
              precond: Preconditioner | None = None,
              x0: np.ndarray | None = None,
              constraints: np.ndarray | None = None) -> SolveResult:
    """Preconditioned steepest descent baseline: trial basis [X | W] only."""
    engine = LobpcgEngine(a_op, cfg, b_op=b_op, precond=precond, x0=x0,
                          constraints=constraints, use_history_direction=False)
    return engine.run()
