#!/usr/bin/env python3
"""Benchmark: compiled trainer kernel vs the pure-Python fallback.

Times nll, nll+gradient and a full training run on synthetic workloads of
increasing size, and checks that both implementations agree numerically.

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from evoloop.trainer.kernels import available_impls

WORKLOADS = [
    # (contexts, templates, occurrences, epochs)
    (30, 6, 500, 50),
    (200, 6, 5_000, 50),
    (500, 12, 50_000, 50),
]
REPEATS = 5


def make_problem(n_ctx, n_tmpl, n_occ, seed=0):
    rng = np.random.default_rng(seed)
    weights = rng.normal(0.0, 1.0, (n_ctx, n_tmpl))
    ctx = rng.integers(0, n_ctx, n_occ).astype(np.int64)
    tmpl = rng.integers(0, n_tmpl, n_occ).astype(np.int64)
    return weights, ctx, tmpl


def best_of(fn, repeats=REPEATS):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main():
    impls = available_impls()
    print(f"kernel implementations: {', '.join(impls)}")
    if len(impls) < 2:
        print("compiled kernel not built; benchmarking the fallback only")

    for n_ctx, n_tmpl, n_occ, epochs in WORKLOADS:
        weights, ctx, tmpl = make_problem(n_ctx, n_tmpl, n_occ)
        print(f"\nworkload: {n_ctx} contexts x {n_tmpl} templates, "
              f"{n_occ} occurrences, {epochs} epochs")
        timings = {}
        for name, impl in impls.items():
            t_nll = best_of(lambda: impl.nll(weights, ctx, tmpl))
            t_grad = best_of(lambda: impl.nll_grad(weights, ctx, tmpl))
            t_train = best_of(
                lambda: impl.train(weights, ctx, tmpl, 5e-5, 5e-6, epochs), repeats=3)
            timings[name] = (t_nll, t_grad, t_train)
            print(f"  {name:>12}: nll {t_nll * 1e3:8.3f} ms | "
                  f"nll+grad {t_grad * 1e3:8.3f} ms | train {t_train * 1e3:9.3f} ms")
        if len(impls) == 2:
            pure, compiled = timings["pure-python"], timings["compiled"]
            speedups = [p / c for p, c in zip(pure, compiled)]
            print(f"  {'speedup':>12}: nll {speedups[0]:7.2f}x | "
                  f"nll+grad {speedups[1]:7.2f}x | train {speedups[2]:8.2f}x")
            w_p, c_p = impls["pure-python"].train(weights, ctx, tmpl, 5e-5, 5e-6, epochs)
            w_c, c_c = impls["compiled"].train(weights, ctx, tmpl, 5e-5, 5e-6, epochs)
            agree = np.allclose(w_p, w_c, rtol=1e-10) and np.allclose(c_p, c_c, rtol=1e-10)
            print(f"  numerical agreement (rtol 1e-10): {'yes' if agree else 'NO'}")


if __name__ == "__main__":
    main()
