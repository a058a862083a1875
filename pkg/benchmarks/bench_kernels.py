"""Time the compiled search kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py --n 7 8 10 --instances 20 --repeat 3
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from transversal import kernels
from transversal.extremal import gen_tight_witness
from transversal.model import Digraph, DigraphCollection, characteristic_bipartite
from transversal.solvers import (
    SearchConfig,
    find_transversal_hamilton_cycle,
    find_transversal_perfect_matching,
)


def random_collection(n: int, p: float, seed: int) -> DigraphCollection:
    rng = random.Random(seed)
    graphs = []
    for _ in range(n):
        graphs.append(Digraph.from_edges(n, [(u, v) for u in range(n) for v in range(n)
                                             if u != v and rng.random() < p]))
    return DigraphCollection(n, tuple(graphs))


def time_backend(name: str, workload, repeat: int) -> tuple[float, int]:
    kernels.use_backend(name)
    runs, nodes = [], 0
    for _ in range(repeat):
        t0 = time.perf_counter()
        nodes = sum(fn(x).stats.nodes for fn, x in workload)
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), nodes


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[7, 8, 10])
    ap.add_argument("--p", type=float, default=0.4)
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if "cython" not in kernels.available_backends():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    cfg = SearchConfig(time_budget=600)
    print(f"{'n':>3} {'problem':>8} {'nodes':>10} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for n in args.n:
        dcs = [random_collection(n, args.p, args.seed * 1000 + i) for i in range(args.instances)]
        loads = {
            "thc": [(lambda d: find_transversal_hamilton_cycle(d, cfg), d) for d in dcs],
            "tpm": [(lambda b: find_transversal_perfect_matching(b, cfg), characteristic_bipartite(d))
                    for d in dcs],
            # exhaustive "none": the whole search tree is visited
            "tight": [(lambda d: find_transversal_hamilton_cycle(d, cfg), gen_tight_witness(n))],
        }
        for problem, work in loads.items():
            py, nodes_py = time_backend("python", work, args.repeat)
            cy, nodes_cy = time_backend("cython", work, args.repeat)
            if nodes_py != nodes_cy:
                print(f"node counts differ at n={n} ({problem}): {nodes_py} vs {nodes_cy}", file=sys.stderr)
                return 4
            print(f"{n:>3} {problem:>8} {nodes_py:>10} {py:>10.4f} {cy:>10.4f} {py / max(cy, 1e-9):>7.1f}x", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
