#!/usr/bin/env python3
"""Compare the JIT-compiled kernels against the pure-Python fallback.

The package selects its backend at import time from the MEMSIG_PURE_PYTHON
environment variable, so this script re-runs itself in a subprocess for each
backend and prints a side-by-side table.  Usage:

    python3 benchmarks/compare_backends.py [--sizes 2,64,512] [--reps 5]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time


def measure(sizes, reps):
    from memsig.bench import bench_sign, bench_verify
    from memsig.group import Secp256k1Group, kernels_enabled
    from memsig.oracles import OracleConfig, Oracles

    group = Secp256k1Group()
    oracles = Oracles(group, OracleConfig())
    rng = random.Random(0xBEAC)
    rows = []
    for n in sizes:
        sign = bench_sign(group, oracles, "mems", n, reps, rng)
        verify = bench_verify(group, oracles, "mems", n, reps, rng)
        rows.append({"n": n, "sign_ns": sign.median_ns, "verify_ns": verify.median_ns})

    # raw group-operation microbenchmarks
    x = group.random_scalar(rng)
    pts = [group.random_element(rng) for _ in range(256)]
    start = time.perf_counter_ns()
    for _ in range(reps):
        group.exp(group.g, x)
    exp_ns = (time.perf_counter_ns() - start) // reps
    start = time.perf_counter_ns()
    for _ in range(reps):
        group.element_product(pts)
    prod_ns = (time.perf_counter_ns() - start) // reps
    return {
        "kernels": kernels_enabled(),
        "rows": rows,
        "exp_ns": exp_ns,
        "product256_ns": prod_ns,
    }


def run_backend(pure, sizes, reps):
    env = dict(os.environ, MEMSIG_PURE_PYTHON="1" if pure else "")
    out = subprocess.run(
        [sys.executable, __file__, "--worker", "--sizes",
         ",".join(map(str, sizes)), "--reps", str(reps)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="2,64,512")
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if args.worker:
        json.dump(measure(sizes, args.reps), sys.stdout)
        return

    jit = run_backend(False, sizes, args.reps)
    pure = run_backend(True, sizes, args.reps)
    assert jit["kernels"] and not pure["kernels"], "backend selection failed"

    def ms(ns):
        return f"{ns / 1e6:10.3f}"

    print(f"{'operation':<24}{'jit ms':>12}{'pure ms':>12}{'speedup':>10}")
    pairs = [("exp (1 base)", jit["exp_ns"], pure["exp_ns"]),
             ("product (256 pts)", jit["product256_ns"], pure["product256_ns"])]
    for a, b in zip(jit["rows"], pure["rows"]):
        pairs.append((f"sign n={a['n']}", a["sign_ns"], b["sign_ns"]))
        pairs.append((f"verify n={a['n']}", a["verify_ns"], b["verify_ns"]))
    for name, j, p in pairs:
        print(f"{name:<24}{ms(j)}{ms(p)}{p / j:>9.2f}x")


if __name__ == "__main__":
    main()
