"""Compare the numba and pure-numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times one plan-sized batch of traces and one dense bump scan per path. The
first numba call (compilation) is timed separately.
"""
import argparse
import time

import numpy as np

from shc import _accel, kernels, oracle
from shc.model import canonical_cycle
from shc.perturb import spawn_center_fixed_points


def _trace_inputs(cycle, pairs):
    out = []
    for m1, m2 in pairs:
        fp = oracle.fixed_point(oracle.loop_return_map(cycle, (m1, m2)))
        out.append((np.array([[m1, m2]], dtype=np.int64), fp))
    return oracle.pack(cycle), out


def _trace_batch(kernel, inputs):
    packed, items = inputs
    for loops, fp in items:
        oracle._trace_arrays(packed, loops, fp, True, kernel)


def _bump(kernel, p, res):
    kernel(p.support[0], p.width, p.amplitude, float(p.frequency), res)


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    c0 = canonical_cycle()
    pairs = [(m1, m2) for m1 in range(10, 40) for m2 in range(4, 14)]
    inputs = _trace_inputs(c0, pairs)
    bump = spawn_center_fixed_points(0.05, 1000, 0.01)
    res = bump.width / (4 * bump.frequency) / 4

    rows = []
    if _accel.HAVE_NUMBA:
        t = time.perf_counter()
        _trace_batch(kernels.trace_jit, (inputs[0], inputs[1][:1]))
        _bump(kernels.bump_scan_jit, bump, res)
        print(f"numba compile + first call: {time.perf_counter() - t:.2f} s")
        paths = [("numpy", kernels.trace_py, kernels.bump_scan_py),
                 ("numba", kernels.trace_jit, kernels.bump_scan_jit)]
    else:
        print("numba not installed; timing the numpy path only")
        paths = [("numpy", kernels.trace_py, kernels.bump_scan_py)]

    for name, tr, bs in paths:
        t_tr = _best(lambda: _trace_batch(tr, inputs), args.repeat)
        t_bs = _best(lambda: _bump(bs, bump, res), args.repeat)
        rows.append((name, t_tr, t_bs))

    print(f"{'path':<8}{'trace x' + str(len(pairs)):>14}{'bump scan':>14}")
    for name, t_tr, t_bs in rows:
        print(f"{name:<8}{t_tr * 1e3:>11.1f} ms{t_bs * 1e3:>11.2f} ms")
    if len(rows) == 2:
        print(f"speedup  {rows[0][1] / rows[1][1]:>12.1f}x{rows[0][2] / rows[1][2]:>13.1f}x")


if __name__ == "__main__":
    main()
