"""Compare the compiled and pure-Python executor kernels.

    python benchmarks/bench_kernel.py [--n 20000] [--repeat 3]

Runs the polyfilled Min interpreter and the specialized function for the
sum program under every available kernel and reports the best wall time.
"""
import argparse
import time

from futamura.executor import KERNELS, run
from futamura.minvm import BYTECODE_BASE, load_program, min_request, shipped_module
from futamura.minvm.programs import sum_program
from futamura.specializer import polyfill_module, specialize_function


def workloads(n):
    p = sum_program(n)
    base = load_program(shipped_module(), p)
    poly, _ = polyfill_module(base)
    f = specialize_function(base, min_request(p, "plain", "backedges", "spec")).function
    return [("interp-plain", poly, "min_plain"), ("specialized-plain", base.with_function(f), "spec")]


def best_time(m, func, backend, repeat):
    best, res = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = run(m, func, [BYTECODE_BASE, 0], backend=backend)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, res


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(KERNELS)
    print(f"sum to {args.n}; kernels: {', '.join(backends)}")
    print(f"{'workload':<20}{'backend':<10}{'insts':>12}{'seconds':>10}{'Minsts/s':>10}")
    for label, m, func in workloads(args.n):
        times = {}
        for b in backends:
            dt, res = best_time(m, func, b, args.repeat)
            times[b] = dt
            insts = res.metrics.insts_executed
            print(f"{label:<20}{b:<10}{insts:>12}{dt:>10.3f}{insts / dt / 1e6:>10.2f}")
        if "cython" in times:
            print(f"{'':<20}speedup cython/python: {times['python'] / times['cython']:.1f}x")


if __name__ == "__main__":
    main()
