"""Compiled vs numpy kernels on the TFXY pair tables.

    python3 benchmarks/bench_kernels.py [--sizes 6,10,14] [--repeat 20]
"""
import argparse
import timeit

import numpy as np

from cartansynth import _kernels_py
from cartansynth.algebra import generate_algebra
from cartansynth.cartan import decompose_algebra
from cartansynth.khk import build_tables, build_v
from cartansynth.models import ModelParams, build_model
from cartansynth.rewrite import tfxy_k_order

try:
    from cartansynth import _kernels as compiled
except ImportError:
    compiled = None


def setup(n: int):
    H = build_model(ModelParams("TFXY", n, sigma=1.0, seed=1))
    split = decompose_algebra(H, generate_algebra(H))
    t = build_tables(tfxy_k_order(n), split.m_basis)
    v = t.vector(build_v(split.h_basis).as_sum())
    h = t.vector(H)
    theta = np.random.default_rng(0).uniform(-0.5, 0.5, len(t.generators))
    return t, theta, v, h


def bench(mod, t, theta, v, h, repeat):
    cg = timeit.timeit(lambda: mod.cost_grad(theta, v, h, t.ptr, t.pa, t.pb, t.ps), number=repeat) / repeat
    jac = timeit.timeit(lambda: mod.residual_jacobian(theta, h, t.ptr, t.pa, t.pb, t.ps), number=repeat) / repeat
    return cg, jac


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="6,10,14")
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernel not built; only the numpy timings are shown")
    print(f"{'n':>3} {'|k|':>5} {'|m|':>5}  {'cost_grad py':>13} {'compiled':>10} {'x':>6}  "
          f"{'jacobian py':>12} {'compiled':>10} {'x':>6}")
    for n in map(int, args.sizes.split(",")):
        t, theta, v, h = setup(n)
        pcg, pj = bench(_kernels_py, t, theta, v, h, args.repeat)
        if compiled is not None:
            ccg, cj = bench(compiled, t, theta, v, h, args.repeat)
            assert np.allclose(_kernels_py.cost_grad(theta, v, h, t.ptr, t.pa, t.pb, t.ps)[1],
                               compiled.cost_grad(theta, v, h, t.ptr, t.pa, t.pb, t.ps)[1], atol=1e-12)
            print(f"{n:>3} {len(theta):>5} {len(h):>5}  {pcg * 1e3:>11.3f}ms {ccg * 1e3:>8.3f}ms {pcg / ccg:>6.1f}  "
                  f"{pj * 1e3:>10.3f}ms {cj * 1e3:>8.3f}ms {pj / cj:>6.1f}")
        else:
            print(f"{n:>3} {len(theta):>5} {len(h):>5}  {pcg * 1e3:>11.3f}ms {'-':>10} {'':>6}  {pj * 1e3:>10.3f}ms")


if __name__ == "__main__":
    main()
