#!/usr/bin/env python3
"""Benchmark: compiled RK4 kernel vs the pure-numpy fallback.

Runs the reference-device mw-opt system (all five modes coupled, pumped)
over a grid of trajectory lengths and reports wall time per backend and
the speedup.  Both backends execute the identical algorithm; results are
checked to agree before timings are reported.

Usage: python benchmarks/bench_integrator.py [--steps N ...]
"""

import argparse
import time

import numpy as np

from eoreadout import EXCITED, reference_params
from eoreadout._kernels import COMPILED_AVAILABLE, rk4_run_compiled, rk4_run_python
from eoreadout.budget import cooperativity_to_g
from eoreadout.integrator import suggested_dt
from eoreadout.system import build_system


def make_problem(n_steps: int):
    p = reference_params()
    sys = build_system(p, EXCITED, "mw-opt")
    g0 = cooperativity_to_g(0.0039, p)
    dt = suggested_dt(p, g_max=g0)
    t_fine = 0.5 * dt * np.arange(2 * n_steps + 1)
    u = np.zeros((2 * n_steps + 1, 3), dtype=complex)
    u[:, 0] = 1.0
    drive = np.ascontiguousarray(u @ sys.b.T)
    # gentle pump ramp so the time-dependent-g path is exercised
    g = g0 * (1.0 - np.exp(-t_fine / (50 * dt))).astype(complex)
    v0 = np.zeros(5, dtype=complex)
    return sys, drive, g, v0, dt


def run(kernel, sys, drive, g, v0, dt, n_steps, repeats: int):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out, bad = kernel(sys.a0, sys.ga, sys.gb, drive, g, v0, dt, n_steps)
        best = min(best, time.perf_counter() - t0)
        assert bad == -1
    return out, best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, nargs="+",
                        default=[2000, 20000, 100000])
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"{'steps':>8}  {'python':>12}  {'compiled':>12}  {'speedup':>8}")
    for n_steps in args.steps:
        sys, drive, g, v0, dt = make_problem(n_steps)
        out_py, t_py = run(rk4_run_python, sys, drive, g, v0, dt,
                           n_steps, args.repeats)
        if not COMPILED_AVAILABLE:
            print(f"{n_steps:>8}  {t_py:>10.4f} s  {'(not built)':>12}")
            continue
        out_cy, t_cy = run(rk4_run_compiled, sys, drive, g, v0, dt,
                           n_steps, args.repeats)
        agree = np.max(np.abs(out_py - out_cy)) / np.max(np.abs(out_py))
        assert agree < 1e-12, f"backend mismatch: {agree:.2e}"
        print(f"{n_steps:>8}  {t_py:>10.4f} s  {t_cy:>10.4f} s  "
              f"{t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
