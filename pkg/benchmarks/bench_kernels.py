"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

from subrisk import SimConfig, exact_risk, simulate_paths, simulate_risk
from subrisk.datasets import breast_cancer, household
from subrisk.montecarlo import PathRequest
from subrisk.table import ProbTable

SMALL = ProbTable.from_groups([[0.1, 0.2, 0.3], [0.4]])


def workloads(backend: str):
    cfg = SimConfig(20_000, seed=0, backend=backend)
    return {
        "simulate_risk household n=1000": lambda: simulate_risk(household(), "submodel", 1000, cfg),
        "simulate_risk breast cancer n=200": lambda: simulate_risk(breast_cancer(), "full", 200, cfg),
        "simulate_paths breast cancer n<=400": lambda: simulate_paths(
            breast_cancer(),
            [PathRequest("full", 200, 200), PathRequest("submodel", 100, 400)],
            SimConfig(2_000, seed=0, backend=backend),
        ),
        "exact_risk 4 cells n=150": lambda: exact_risk(SMALL, "submodel", 150, backend=backend),
    }


def best_of(fn, repeat: int) -> float:
    fn()  # warm-up; includes numba compilation or cache load
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    numba_w, numpy_w = workloads("numba"), workloads("numpy")
    print(f"{'workload':40s} {'numba s':>9s} {'numpy s':>9s} {'speedup':>8s}")
    for name in numba_w:
        a = best_of(numba_w[name], args.repeat)
        b = best_of(numpy_w[name], args.repeat)
        print(f"{name:40s} {a:9.3f} {b:9.3f} {b / a:7.1f}x")


if __name__ == "__main__":
    main()
