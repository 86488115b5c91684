"""The many-small-blocks variant: independent narrow recurrences coupled by
a shared Rayleigh-Ritz step every `rr_period` rounds.

With rr_period=1 the coupling runs every round and the carried directions
reset each time; larger periods let each narrow recurrence run true 3-term
steps between couplings, trading coupling cost against per-round work.

Run:  python demos/04_narrow_recurrences.py
"""

import numpy as np

from lobpcg_kit import (
    Lobpcg2Config,
    SolverConfig,
    SparseSymMatrix,
    lobpcg2_solve,
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


rng = np.random.default_rng(3)
n = 100
q, _ = np.linalg.qr(rng.standard_normal((n, n)))
spectrum = np.concatenate([np.linspace(1.0, 10.0, 8), np.linspace(14.0, 40.0, n - 8)])
matrix = from_dense((q * spectrum) @ q.T)

nev = 6
reference = lobpcg_solve(matrix, SolverConfig(nev=nev, tol=1e-8, seed=0))
print(f"full block (width {nev})      : {reference.iterations:4d} iterations, "
      f"{reference.counters.rayleigh_ritz_calls:4d} projection calls")

print()
print("sub_block  rr_period  iterations  shared+local RR calls  max|diff|")
for sub_block in (1, 2, 3):
    for rr_period in (1, 5):
        cfg = Lobpcg2Config(nev=nev, sub_block=sub_block, rr_period=rr_period,
                            tol=1e-8, seed=0)
        result = lobpcg2_solve(matrix, cfg)
        diff = np.max(np.abs(result.values - reference.values))
        print(f"{sub_block:9d}  {rr_period:9d}  {result.iterations:10d}  "
              f"{result.counters.rayleigh_ritz_calls:21d}  {diff:.2e}")

print()
print("All configurations land on the same eigenvalues; sparser coupling")
print("(larger rr_period) usually converges in fewer rounds because the")
print("narrow recurrences keep their carried direction between couplings.")
