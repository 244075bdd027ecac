#!/usr/bin/env python3
"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Reports per-call cost of the fixed-theta QP, a 360-point theta scan, and a
full ``optimize`` call on the same seeded inputs for each backend, plus the
largest objective disagreement between backends.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hcbf import _kernels_py
from hcbf.filter import optimize
from hcbf.instances import random_instance

try:
    from hcbf import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def _qp_inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        m = rng.normal(size=(2, 2))
        q = m @ m.T + 0.1 * np.eye(2)
        rows = [tuple(rng.normal(size=3)) for _ in range(rng.integers(0, 5))]
        out.append((q[0, 0], q[0, 1], q[1, 1], *rng.uniform(-2, 2, 2), 1.0, rows))
    return out


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(mod, qp_inputs, scan_inputs, repeat):
    res = {}
    res["solve_qp"] = _time(lambda: [mod.solve_qp(*a) for a in qp_inputs], repeat) / len(qp_inputs)

    def scans():
        for th, dl, rel, args, others in scan_inputs:
            n = len(th)
            mod.scan_theta(th, dl, *rel, *args, others, np.empty(n), np.empty((n, 2)), np.empty(n))
    res["scan_theta_360"] = _time(scans, repeat) / len(scan_inputs)
    objs = [mod.solve_qp(*a)[3] for a in qp_inputs]
    return res, np.array(objs)


def bench_optimize(kernel_mod, instances, repeat):
    from hcbf import filter as F
    saved = F.kernels
    shim = type("K", (), {"solve_qp": staticmethod(kernel_mod.solve_qp),
                          "eval_theta": staticmethod(kernel_mod.eval_theta),
                          "scan_theta": staticmethod(kernel_mod.scan_theta)})
    F.kernels = shim
    try:
        def run():
            for inst in instances:
                optimize(inst.agent, [inst.obstacle], [inst.support], inst.u_des,
                         inst.config, inst.limits)
        return _time(run, repeat) / len(instances)
    finally:
        F.kernels = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--count", type=int, default=200)
    args = ap.parse_args(argv)

    qp_inputs = _qp_inputs(args.count)
    instances = [random_instance(7, i) for i in range(max(args.count // 10, 1))]
    scan_inputs = []
    for inst in instances:
        th, dl = inst.support.grid(360)
        dp = inst.agent.p - inst.obstacle.position
        dv = inst.agent.v - inst.obstacle.velocity
        q = inst.config.q
        scan_inputs.append((th, dl, (*dp, *dv),
                            (1.0, inst.config.alpha_gain, q[0, 0], q[0, 1], q[1, 1], *inst.u_des),
                            []))

    backends = [("python", _kernels_py)]
    if _kernels_c is not None:
        backends.insert(0, ("cython", _kernels_c))
    else:
        print("compiled extension not built; timing the Python fallback only")

    results, objs = {}, {}
    for name, mod in backends:
        r, o = bench_backend(mod, qp_inputs, scan_inputs, args.repeat)
        r["optimize"] = bench_optimize(mod, instances, args.repeat)
        results[name], objs[name] = r, o

    print(f"{'kernel':<18}" + "".join(f"{n:>14}" for n in results) +
          ("      speedup" if len(results) == 2 else ""))
    for key in ("solve_qp", "scan_theta_360", "optimize"):
        line = f"{key:<18}" + "".join(f"{results[n][key] * 1e6:>11.1f} us" for n in results)
        if len(results) == 2:
            line += f"{results['python'][key] / results['cython'][key]:>12.1f}x"
        print(line)
    if len(objs) == 2:
        a, b = objs["cython"], objs["python"]
        fin = np.isfinite(a) & np.isfinite(b)
        same = np.array_equal(np.isfinite(a), np.isfinite(b))
        print(f"max |objective difference| {np.max(np.abs(a[fin] - b[fin]), initial=0.0):.3g}, "
              f"feasibility agrees: {same}")


if __name__ == "__main__":
    main()
