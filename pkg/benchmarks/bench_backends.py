#!/usr/bin/env python3
"""Benchmark the compiled tape kernel against the numpy fallback.

Measures the raw kernels (array and scalar evaluation) and two end-to-end
workloads whose inner loops are dominated by expression evaluation: a
singular time-map integral and a short curve trace.

Usage:  python3 benchmarks/bench_backends.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from semibif.analysis import build_nonlinearity, locate_landmarks
from semibif.backend import TapeFunction, available_backends, set_backend
from semibif.expr import parse
from semibif.timemap import time_map
from semibif.tracing import trace

ARRAY_N = 200_000
SCALAR_N = 20_000

EXPRESSIONS = {
    "quartic": "-15*u^4 + 140*u^3 - 450*u^2 + 540*u - 138",
    "logarithmic": "ln(u)",
    "mixed": "sigma*u - u^(-p) + exp(-u)*sqrt(u)",
}


def _best_of(repeats, fn):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(repeats: int):
    us = np.geomspace(1e-6, 45.0, ARRAY_N)
    rows = []
    for label, text in EXPRESSIONS.items():
        fn = TapeFunction(parse(text), {"sigma": 2.0, "p": 0.5})
        row = {"workload": f"array eval [{label}] ({ARRAY_N} pts)"}
        for backend in available_backends():
            set_backend(backend)
            dt = _best_of(repeats, lambda: fn.many(us))
            row[backend] = ARRAY_N / dt / 1e6  # Meval/s
        rows.append((row, "Meval/s"))
    fn = TapeFunction(parse(EXPRESSIONS["quartic"]))
    row = {"workload": f"scalar eval [quartic] ({SCALAR_N} calls)"}
    for backend in available_backends():
        set_backend(backend)

        def loop():
            for u in range(1, SCALAR_N + 1):
                fn(0.001 * u)

        dt = _best_of(repeats, loop)
        row[backend] = SCALAR_N / dt / 1e6
    rows.append((row, "Meval/s"))
    return rows


def bench_end_to_end(repeats: int):
    nl = build_nonlinearity(parse("ln(u)"), {},
                            closed_form_F=parse("u*ln(u) - u"))
    lm = locate_landmarks(nl)
    rows = []
    row = {"workload": "time map at 20 amplitudes (tol 1e-10)"}
    alphas = np.linspace(3.0, 20.0, 20)
    for backend in available_backends():
        set_backend(backend)
        dt = _best_of(repeats,
                      lambda: [time_map(nl, lm, float(a)) for a in alphas])
        row[backend] = dt * 1e3
    rows.append((row, "ms"))
    row = {"workload": "16-point trace with slopes"}
    for backend in available_backends():
        set_backend(backend)
        dt = _best_of(repeats, lambda: trace(nl, lm, n_points=16))
        row[backend] = dt * 1e3
    rows.append((row, "ms"))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    if len(backends) < 2:
        print("compiled kernel not built; benchmarking the fallback only")

    rows = bench_kernels(args.repeats) + bench_end_to_end(args.repeats)
    width = max(len(r["workload"]) for r, _ in rows) + 2
    header = f"{'workload':<{width}}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for row, unit in rows:
        line = f"{row['workload']:<{width}}" + "".join(
            f"{row[b]:>12.2f}" for b in backends)
        if len(backends) == 2:
            a, b = row[backends[0]], row[backends[1]]
            speed = (a / b) if unit != "ms" else (b / a)
            line += f"{speed:>9.1f}x"
        print(line + f"  [{unit}]")
    set_backend(backends[0])


if __name__ == "__main__":
    main()
