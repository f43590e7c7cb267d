#!/usr/bin/env python
"""Time the numba kernels against the pure-numpy fallback.

Three workloads:
1. lex_backward on a hazard grid (the solver's inner loop)
2. lex_backward on dense random instances
3. enumerate_evaluate over a block of policies (the oracle's inner loop)

Outputs of both backends are compared before timing is reported.

Usage:
    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --repeat 5 --output bench.json
"""

import argparse
import json
import time

import numpy as np

from lexiplan import kernels
from lexiplan.generators import generate_hazard_grid, generate_random, random_rewards
from lexiplan.quantile import quantile_rewards
from lexiplan.rewards import marginalize_rewards


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads():
    grid = generate_hazard_grid(12, 12, 40, hazards=20, slip=0.125, seed=1)
    Rsa = marginalize_rewards(grid, quantile_rewards(grid, [2, 4, 3]))
    yield "lex_backward grid 12x12 T=40 L=3", lambda b: b.lex_backward(grid.transitions, Rsa, grid.horizon, 1e-9)

    for S in (50, 150):
        inst = generate_random(S, 4, 20, 5, density=0.2, seed=S)
        R = marginalize_rewards(inst, random_rewards(inst, 3, seed=S))
        yield (
            f"lex_backward random S={S} A=4 T=20 L=3",
            lambda b, inst=inst, R=R: b.lex_backward(inst.transitions, R, inst.horizon, 1e-9),
        )

    small = generate_random(5, 3, 2, 2, seed=3)
    Rs = marginalize_rewards(small, random_rewards(small, 2, seed=3))
    count = 3 ** 10
    yield (
        f"enumerate_evaluate {count} policies S=5 A=3 T=2",
        lambda b: b.enumerate_evaluate(
            small.transitions, Rs, small.initial_distribution, small.end_rank, 3, 2, 0, count
        ),
    )


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=0, atol=1e-12)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--output", help="write results as JSON")
    args = parser.parse_args()

    if "numba" not in kernels.BACKENDS:
        parser.exit(1, "numba backend unavailable\n")
    numba_b, numpy_b = kernels.get_backend("numba"), kernels.get_backend("numpy")

    rows = []
    print(f"{'workload':<44} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for name, fn in workloads():
        fn(numba_b)  # compile / warm caches
        t_np, out_np = best_time(lambda: fn(numpy_b), args.repeat)
        t_nb, out_nb = best_time(lambda: fn(numba_b), args.repeat)
        if not same(out_np, out_nb):
            raise SystemExit(f"backends disagree on {name}")
        rows.append({"workload": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb})
        print(f"{name:<44} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.1f}x")

    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
