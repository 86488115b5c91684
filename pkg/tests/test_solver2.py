"""Many-small-blocks solver: agreement with the full-block method,
coupling-period behavior, aggregate invariants."""

import numpy as np
import pytest

from conftest import easy_spd_problem, random_spd_metric

from lobpcg_kit import (
    IdentityOperator,
    InvalidConfigError,
    Lobpcg2Config,
    SolverConfig,
    csr_from_coo,
    dense_oracle,
    jacobi_precond,
    lobpcg2_solve,
    lobpcg_solve,
    norm_estimates,
    op_apply,
)


def diag_operator(n):
    return csr_from_coo(n, [(i, i, float(i + 1)) for i in range(n)])


def b_defect(vectors, b_op):
    gram = vectors.T @ op_apply(b_op, vectors)
    return np.max(np.abs(gram - np.eye(vectors.shape[1])))


class TestExamples:
    def test_single_vector_recurrences(self):
        res = lobpcg2_solve(diag_operator(10),
                            Lobpcg2Config(nev=4, sub_block=1, rr_period=1))
        assert res.status == "converged"
        np.testing.assert_allclose(res.values, [1.0, 2.0, 3.0, 4.0], atol=1e-7)

    def test_sparse_coupling_same_answer(self):
        base = lobpcg2_solve(diag_operator(10),
                             Lobpcg2Config(nev=4, sub_block=1, rr_period=1))
        sparse = lobpcg2_solve(diag_operator(10),
                               Lobpcg2Config(nev=4, sub_block=1, rr_period=5,
                                             max_iter=max(3 * base.iterations, 10)))
        assert sparse.status == "converged"
        np.testing.assert_allclose(sparse.values, [1.0, 2.0, 3.0, 4.0], atol=1e-7)
        assert sparse.iterations <= 3 * base.iterations

    def test_single_sub_solver_matches_full_block(self):
        a = diag_operator(10)
        narrow = lobpcg2_solve(a, Lobpcg2Config(nev=2, sub_block=2, rr_period=1,
                                                tol=1e-9, seed=4))
        full = lobpcg_solve(a, SolverConfig(nev=2, tol=1e-9, seed=4))
        assert np.max(np.abs(narrow.values - full.values)) <= 1e-9

    def test_padding_discarded(self):
        res = lobpcg2_solve(diag_operator(12),
                            Lobpcg2Config(nev=3, sub_block=2, rr_period=1))
        assert res.status == "converged"
        assert res.values.shape == (3,)
        np.testing.assert_allclose(res.values, [1.0, 2.0, 3.0], atol=1e-7)


class TestCrossVariantAgreement:
    @pytest.mark.parametrize("sub_block,rr_period", [(1, 1), (1, 5), (2, 1), (2, 5)])
    def test_agrees_with_full_block_and_oracle(self, sub_block, rr_period):
        for seed in (0, 1, 2):
            n = 48 + 24 * seed
            a = easy_spd_problem(seed + 100, n)
            nev = 4
            full = lobpcg_solve(a, SolverConfig(nev=nev, seed=seed))
            narrow = lobpcg2_solve(a, Lobpcg2Config(nev=nev, sub_block=sub_block,
                                                    rr_period=rr_period, seed=seed))
            oracle = dense_oracle(a, IdentityOperator(n))
            assert narrow.status == "converged"
            slack = 1e-6 * (1 + np.abs(oracle.values[:nev]))
            assert np.all(np.abs(narrow.values - full.values) <= slack)
            assert np.all(np.abs(narrow.values - oracle.values[:nev]) <= slack)

    def test_generalized_metric_and_preconditioner(self):
        n = 60
        a = easy_spd_problem(7, n)
        b = random_spd_metric(8, n)
        res = lobpcg2_solve(a, Lobpcg2Config(nev=4, sub_block=2, rr_period=2),
                            b_op=b, precond=jacobi_precond(a))
        oracle = dense_oracle(a, b)
        assert res.status == "converged"
        assert np.all(np.abs(res.values - oracle.values[:4])
                      <= 1e-6 * (1 + np.abs(oracle.values[:4])))
        assert b_defect(res.vectors, b) <= 1e-8


class TestAggregateInvariants:
    def test_orthonormal_after_terminal_rr_at_cutpoints(self):
        a = easy_spd_problem(31, 56)
        for cap in (1, 2, 5, 9):
            res = lobpcg2_solve(a, Lobpcg2Config(nev=4, sub_block=2, rr_period=3,
                                                 max_iter=cap))
            assert b_defect(res.vectors, IdentityOperator(56)) <= 1e-8

    def test_shared_rr_values_monotone(self):
        a = easy_spd_problem(37, 72)
        period = 3
        res = lobpcg2_solve(a, Lobpcg2Config(nev=4, sub_block=2, rr_period=period,
                                             record_history=True, seed=1))
        assert res.status == "converged"
        # records at iteration 1 + k*period reflect freshly coupled states
        coupled = [rec for rec in res.history if rec.iteration % period == 1]
        for prev, nxt in zip(coupled, coupled[1:]):
            slack = 1e-10 * (1 + np.abs(prev.ritz_values))
            assert np.all(nxt.ritz_values <= prev.ritz_values + slack)

    def test_history_integrity(self):
        a = easy_spd_problem(41, 40)
        res = lobpcg2_solve(a, Lobpcg2Config(nev=3, sub_block=1, rr_period=2,
                                             record_history=True))
        locked_prev = 0
        for rec in res.history:
            assert np.all(np.diff(rec.ritz_values) >= 0)
            assert rec.locked_count >= locked_prev
            locked_prev = rec.locked_count

    def test_locked_columns_stay_converged(self):
        a = easy_spd_problem(43, 50)
        cfg = Lobpcg2Config(nev=5, sub_block=1, rr_period=4, tol=1e-8)
        res = lobpcg2_solve(a, cfg)
        assert res.status == "converged"
        norm_a = norm_estimates(a)
        fresh = op_apply(a, res.vectors) - res.vectors * res.values[None, :]
        fresh_norms = np.linalg.norm(fresh, axis=0)
        relaxed = 10 * cfg.tol * (norm_a + np.abs(res.values)) \
            * np.linalg.norm(res.vectors, axis=0)
        assert np.all(fresh_norms <= relaxed)


class TestValidation:
    def test_rr_period_positive(self):
        with pytest.raises(InvalidConfigError):
            lobpcg2_solve(diag_operator(10), Lobpcg2Config(nev=2, rr_period=0))

    def test_sub_block_cap(self):
        with pytest.raises(InvalidConfigError):
            lobpcg2_solve(diag_operator(10), Lobpcg2Config(nev=4, sub_block=4))

    def test_padded_width_must_fit(self):
        with pytest.raises(InvalidConfigError):
            lobpcg2_solve(diag_operator(8), Lobpcg2Config(nev=9, sub_block=1))
