"""Time the compiled kernels against the pure-Python fallback.

Run from the repository root after an editable install:

    python3 benchmarks/compare_backends.py [--repeats N]

Each kernel is timed with ``timeit``-style best-of-N on a fixed
workload, using a freshly seeded generator per measurement so both
backends consume identical entropy where the algorithms allow it.
"""

import argparse
import time

import numpy as np

import wcauth
from wcauth import kernels
from wcauth.errors import ConfigError


def seeded_rng():
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(99)))


def build_workloads():
    affine = wcauth.build_affine_family(101)  # 10201 keys
    table = affine.tag_table()
    return [
        (
            "asu2_scan (p=101, 10201 keys)",
            lambda be: be.asu2_scan(np.ascontiguousarray(table, dtype=np.uint16), 101),
        ),
        (
            "weak_pair_trials (10201 keys, 50k trials)",
            lambda be: be.weak_pair_trials(
                np.ascontiguousarray(table, dtype=np.uint16),
                101, 4080, 1, 50000, seeded_rng(),
            ),
        ),
        (
            "partition_trials (1344 survivors, 500k trials)",
            lambda be: be.partition_trials(1344, 64, 0, 1, 500000, seeded_rng()),
        ),
        (
            "salted_certain_trials (1792 keys, 100k trials)",
            lambda be: be.salted_certain_trials(
                1792, 112, 1344, 14, 1, 100000, seeded_rng()
            ),
        ),
    ]


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = {}
    for name in ("python", "compiled"):
        try:
            backends[name] = kernels.load_backend(name)
        except ConfigError as exc:
            print(f"skipping {name}: {exc}")
    if "compiled" not in backends:
        raise SystemExit("compiled backend unavailable, nothing to compare")

    rows = []
    for label, call in build_workloads():
        times = {
            name: best_of(lambda be=be: call(be), args.repeats)
            for name, be in backends.items()
        }
        rows.append((label, times))

    width = max(len(label) for label, _ in rows)
    print(f"{'kernel':<{width}}  {'python (s)':>10}  {'compiled (s)':>12}  {'speedup':>8}")
    for label, times in rows:
        pure = times.get("python", float("nan"))
        compiled = times["compiled"]
        speedup = pure / compiled if compiled > 0 else float("inf")
        print(f"{label:<{width}}  {pure:>10.4f}  {compiled:>12.4f}  {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
