#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-numpy fallback.

Times the two hot kernels (modular matrix multiplication and augmented row
reduction) side by side at several sizes, then times one full scheme
construction per backend in a subprocess (backend choice is fixed at import,
so end-to-end comparison needs a fresh interpreter).

Run:  python3 benchmarks/bench_core.py [--sizes 64,128,256] [--repeat 5]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from linsep import _core_py

try:
    from linsep import _corex
except ImportError:  # pragma: no cover - depends on the build
    _corex = None

MODULUS = 1_000_003

END_TO_END_SNIPPET = """
import time
import numpy as np
from linsep import BACKEND
from linsep.gf import FieldSpec
from linsep.model import ProblemInstance, random_full_rank_demand
from linsep.scheme1 import partitioned_solution

inst = ProblemInstance(300, 20, 20, FieldSpec(1009))
demand = random_full_rank_demand(inst, np.random.default_rng(0))
started = time.perf_counter()
solution = partitioned_solution(demand, 20)
elapsed = time.perf_counter() - started
print(f"{BACKEND} {elapsed:.4f} rate={solution.rate}")
"""


def best_of(repeat: int, fn) -> float:
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def bench_kernels(size: int, repeat: int, rng: np.random.Generator) -> list[tuple[str, int, float, float | None]]:
    a = rng.integers(0, MODULUS, size=(size, size), dtype=np.int64)
    b = rng.integers(0, MODULUS, size=(size, size), dtype=np.int64)
    work = rng.integers(0, MODULUS, size=(size, 2 * size), dtype=np.int64)
    rows = []
    for name, call in (
        ("mat_mul", lambda impl: impl.mat_mul(a, b, MODULUS)),
        ("rref_augmented", lambda impl: impl.rref_augmented(work.copy(), MODULUS, size)),
    ):
        python_s = best_of(repeat, lambda: call(_core_py))
        compiled_s = best_of(repeat, lambda: call(_corex)) if _corex else None
        rows.append((name, size, python_s, compiled_s))
    return rows


def bench_end_to_end() -> None:
    print("\nend-to-end scheme construction (K=300, L=20, M=20, q=1009):")
    base_env = {k: v for k, v in os.environ.items() if k != "LINSEP_PURE_PYTHON"}
    for env in ({**base_env, "LINSEP_PURE_PYTHON": "1"}, base_env):
        result = subprocess.run(
            [sys.executable, "-c", END_TO_END_SNIPPET],
            capture_output=True,
            text=True,
            env=env,
        )
        line = result.stdout.strip() or result.stderr.strip()
        backend, seconds, rate = line.split()
        print(f"  {backend:<8} {float(seconds) * 1e3:9.1f} ms   ({rate})")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="64,128,256", help="comma-separated matrix sizes")
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions per cell")
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",") if tok]

    print(f"compiled backend available: {'yes' if _corex else 'no'}")
    print(f"{'operation':<16} {'size':>5} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    rng = np.random.default_rng(0)
    for size in sizes:
        for name, n, python_s, compiled_s in bench_kernels(size, args.repeat, rng):
            if compiled_s is None:
                print(f"{name:<16} {n:>5} {python_s * 1e3:>10.2f} {'n/a':>10} {'n/a':>8}")
            else:
                print(
                    f"{name:<16} {n:>5} {python_s * 1e3:>10.2f} "
                    f"{compiled_s * 1e3:>10.2f} {python_s / compiled_s:>7.1f}x"
                )
    bench_end_to_end()
    return 0


if __name__ == "__main__":
    sys.exit(main())
