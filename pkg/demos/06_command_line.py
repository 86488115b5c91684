"""Drive the command-line surface end to end: write problem files, solve,
sweep a benchmark grid, and bisect a graph, all into a scratch directory.

Run:  python demos/06_command_line.py
"""

import json
import pathlib
import tempfile

from lobpcg_kit import csr_from_coo, write_edge_csv, write_matrix_market_symmetric
from lobpcg_kit.cli import main

workdir = pathlib.Path(tempfile.mkdtemp(prefix="lobpcg_kit_demo_"))
print(f"scratch directory: {workdir}\n")

# a 1-d Laplacian as a Matrix Market file
n = 120
triplets = [(i, i, 2.0) for i in range(n)] + [(i, i + 1, -1.0) for i in range(n - 1)]
matrix_path = workdir / "laplacian.mtx"
write_matrix_market_symmetric(matrix_path, csr_from_coo(n, triplets))

# solve: JSON document with a reproducibility manifest
out = workdir / "solve.json"
code = main(["solve", "--matrix", str(matrix_path), "--nev", "3",
             "--seed", "1", "--vectors-out", str(workdir / "vectors.mtx"),
             "--out", str(out)])
doc = json.loads(out.read_text())
print(f"solve: exit {code}, status {doc['status']}, "
      f"{doc['iterations']} iterations")
print(f"eigenvalues: {doc['eigenvalues']}")
print(f"manifest flags (replay these to reproduce): {doc['manifest']['flags']}\n")

# warm start from the vectors file written above
code = main(["solve", "--matrix", str(matrix_path), "--nev", "3",
             "--x0", str(workdir / "vectors.mtx"),
             "--out", str(workdir / "warm.json")])
warm = json.loads((workdir / "warm.json").read_text())
print(f"warm start: exit {code}, {warm['iterations']} iterations\n")

# bench: one CSV row per grid cell with exact operation tallies
bench_out = workdir / "bench.csv"
main(["bench", "--matrix", str(matrix_path), "--nev", "3",
      "--grid", "variant=lobpcg,psd;precond=none,jacobi", "--max-iter", "300",
      "--out", str(bench_out)])
print("bench grid:")
print(bench_out.read_text())

# partition: two triangles and a bridge
edges_path = workdir / "graph.csv"
write_edge_csv(edges_path, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0),
                            (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0),
                            (2, 3, 0.5)])
code = main(["partition", "--edges", str(edges_path),
             "--out", str(workdir / "partition.json")])
part = json.loads((workdir / "partition.json").read_text())
print(f"partition: exit {code}, labels {part['labels']}, "
      f"cut weight {part['cut_weight']}")
