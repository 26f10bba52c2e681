#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Runs the two hot loops (Monte-Carlo pumping trials and absorbing-chain
budget scans) on planner-realistic workloads and prints a timing table.
Outputs are asserted identical across backends before timing.

Usage: python benchmarks/bench_backends.py [--trials N]
"""

import argparse
import time

import numpy as np

from rnp import ErrorParams, PumpSchedule, RestartMode, build_chain, run_two_level
from rnp.backend import available_backends, get_backend


def pumping_workload():
    p = ErrorParams(p_local=1e-6, p_init=0.05, p_meas=0.05, fidelity=0.95)
    trace = run_two_level(PumpSchedule(4, 5), p, 1.2e-5)
    chain = build_chain(trace, RestartMode.FULL)
    bit = np.array([s.success_prob for s in trace.steps[:4]])
    phase = np.array([s.success_prob for s in trace.steps[4:]])
    return bit, phase, chain


def bench(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=100_000)
    args = parser.parse_args()

    names = available_backends()
    if len(names) < 2:
        print("compiled backend not built; benchmarking the python backend only")

    bit, phase, chain = pumping_workload()
    results = {}
    for name in names:
        k = get_backend(name)
        t_mc, consumed = bench(lambda: k.mc_consumed_pairs(bit, phase, True, args.trials, 7))
        t_scan, scan = bench(
            lambda: k.chain_scan(
                chain.trans_src, chain.trans_dst, chain.trans_p,
                chain.n_states, chain.start, chain.done, 1e-6, 10**6,
            )
        )
        results[name] = (t_mc, np.asarray(consumed), t_scan, tuple(scan))

    print(f"{'backend':<10} {'mc trials':>12} {'chain scan':>12}")
    for name, (t_mc, _, t_scan, _) in results.items():
        print(f"{name:<10} {t_mc * 1e3:>10.1f}ms {t_scan * 1e3:>10.1f}ms")

    if len(names) == 2:
        a, b = results["python"], results["compiled"]
        assert (a[1] == b[1]).all(), "backends disagree on Monte-Carlo output"
        assert a[3] == b[3], "backends disagree on chain scan output"
        print(f"outputs identical; speedup: mc {a[0] / b[0]:.1f}x, scan {a[2] / b[2]:.1f}x")


if __name__ == "__main__":
    main()
