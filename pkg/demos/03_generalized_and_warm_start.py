"""Generalized problems A x = lambda B x and warm starts.

Run:  python demos/03_generalized_and_warm_start.py
"""

import numpy as np

from lobpcg_kit import (
    SolverConfig,
    SparseSymMatrix,
    dense_oracle,
    jacobi_precond,
    lobpcg_solve,
)


def from_dense(dense):
    n = dense.shape[0]
    rows, cols = np.nonzero(dense)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.add.at(offsets, rows + 1, 1)
    return SparseSymMatrix(n, np.cumsum(offsets), cols, dense[rows, cols])


rng = np.random.default_rng(42)
n = 120

# stiffness with a known, well separated bottom spectrum
q, _ = np.linalg.qr(rng.standard_normal((n, n)))
spectrum = np.concatenate([np.linspace(1.0, 9.0, 8), np.linspace(13.0, 40.0, n - 8)])
stiffness = from_dense((q * spectrum) @ q.T)

# a well conditioned SPD metric
g = rng.standard_normal((n, n)) / np.sqrt(n)
metric = from_dense(g.T @ g + np.eye(n))

config = SolverConfig(nev=5, tol=1e-8, seed=1)
result = lobpcg_solve(stiffness, config, b_op=metric,
                      precond=jacobi_precond(stiffness))
oracle = dense_oracle(stiffness, metric)
print(f"pencil solve : {result.status} in {result.iterations} iterations")
print(f"values       : {result.values}")
print(f"oracle error : {np.max(np.abs(result.values - oracle.values[:5])):.2e}")

gram = result.vectors.T @ metric.apply(result.vectors)
print(f"B-orthonormal: max|V^T B V - I| = {np.max(np.abs(gram - np.eye(5))):.2e}")

# warm start: feeding the converged block back terminates immediately
again = lobpcg_solve(stiffness, config, b_op=metric,
                     precond=jacobi_precond(stiffness), x0=result.vectors)
print(f"warm start   : {again.status} in {again.iterations} iterations")

# perturb the operator slightly: the old vectors remain an excellent guess
noise = rng.standard_normal((n, n)) * 1e-3
bumped = from_dense((q * spectrum) @ q.T + noise + noise.T)
moved = lobpcg_solve(bumped, config, b_op=metric,
                     precond=jacobi_precond(bumped), x0=result.vectors)
print(f"perturbed op : {moved.status} in {moved.iterations} iterations "
      f"(vs {result.iterations} from random)")
