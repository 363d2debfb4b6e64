#!/usr/bin/env python3
"""Benchmark the two exact-LP kernel lanes (pure Python vs compiled Cython)
on representative workloads, verifying bit-identical results as it goes.

Usage: python scripts/benchmark_kernels.py [--quick]
"""

import argparse
import random
import time


def random_instances(count, rng):
    out = []
    for _ in range(count):
        n = rng.randint(2, 4)
        rows = []
        for j in range(n):
            lo = rng.randint(-4, 0)
            hi = lo + rng.randint(1, 5)
            row = [0] * n
            row[j] = 1
            rows.append((list(row), hi, 0))
            row = [0] * n
            row[j] = -1
            rows.append((list(row), -lo, 0))
        for _ in range(rng.randint(1, 4)):
            rows.append(([rng.randint(-3, 3) for _ in range(n)], rng.randint(-4, 6), 0))
        rows.append(([rng.randint(1, 3) for _ in range(n)], rng.randint(0, 4), 1))
        obj = [rng.randint(-5, 5) for _ in range(n)]
        out.append((n, obj, rows))
    return out


def bench_raw_lps(kernel, instances):
    t0 = time.perf_counter()
    results = [kernel.solve_canonical(n, obj, rows) for n, obj, rows in instances]
    return time.perf_counter() - t0, results


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()

    from lossforge.lp import kernel_module

    py = kernel_module("py")
    try:
        cy = kernel_module("cy")
    except ImportError:
        print("compiled kernel not built; run `pip install -e .` with Cython")
        return 1

    n_lp = 300 if args.quick else 2000
    rng = random.Random(42)
    instances = random_instances(n_lp, rng)
    t_py, res_py = bench_raw_lps(py, instances)
    t_cy, res_cy = bench_raw_lps(cy, instances)
    assert res_py == res_cy, "lanes disagree!"
    print("raw simplex, %d instances:  py %.3fs   cy %.3fs   speedup %.1fx"
          % (n_lp, t_py, t_cy, t_py / t_cy), flush=True)

    import os
    import subprocess
    import sys

    for lane in ("py", "cy"):
        # lane selection happens at import time, so run each in a subprocess
        m = 4 if args.quick else 8
        script = (
            "import time\n"
            "from fractions import Fraction as F\n"
            "import random\n"
            "from lossforge.lp import active_kernel\n"
            "from lossforge.polyhedral import enumerate_optimal_sets\n"
            "from lossforge.zoo import abstain_surrogate, abstain_embedding\n"
            "from lossforge.link import build_link\n"
            "from lossforge.geometry import Norm\n"
            "t0 = time.perf_counter()\n"
            "fam = enumerate_optimal_sets(abstain_surrogate(4), %d)\n"
            "t1 = time.perf_counter()\n"
            "link = build_link(fam, abstain_embedding(4), Norm.LINF, F(1,2), tie_break=('abstain',))\n"
            "rng = random.Random(7)\n"
            "us = [(F(rng.randint(-32,32),16), F(rng.randint(-32,32),16)) for _ in range(%d)]\n"
            "t2 = time.perf_counter()\n"
            "for u in us: link(u)\n"
            "t3 = time.perf_counter()\n"
            "print('  [%%s] optimal-set scan m=%d: %%.3fs   %%d link evals: %%.3fs'\n"
            "      %% (active_kernel(), t1-t0, len(us), t3-t2))\n"
        ) % (m, 200 if args.quick else 1000, m)
        subprocess.run([sys.executable, "-c", script], check=True,
                       env={**os.environ, "LOSSFORGE_KERNEL": lane})
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
