"""Compare the numba and numpy forward kernels on deep assembled networks.

    python benchmarks/bench_forward.py [--points N] [--repeat R]
"""
import argparse
import time

import numpy as np

from minwidth import _kernels, targets
from minwidth.construct import assemble_lp_net, assemble_uniform_net
from minwidth.geometry import random_width2_net


def timed(fn, X, packed, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(X, packed)
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    trio = targets.product_mean_absdiff()
    yield "uniform K=M=4", assemble_uniform_net(trio, 4, 4), 2
    yield "uniform K=M=5", assemble_uniform_net(trio, 5, 5), 2
    yield "lp K=M=4", assemble_lp_net(trio, 4, 4, gamma=0.001, p=2).net, 2
    yield "random width-2", random_width2_net(np.random.default_rng(0)), 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=40_401)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is unavailable; unset MINWIDTH_BACKEND=numpy to benchmark both kernels")

    rng = np.random.default_rng(1)
    print(f"{'network':<16} {'depth':>6} {'numpy s':>9} {'numba s':>9} {'speedup':>8}  max |diff|")
    for name, net, dx in cases():
        packed = net.packed()
        X = rng.uniform(0, 1, (args.points, dx))
        _kernels.forward_numba(X[:2], packed)  # compile outside the timing
        t_np, y_np = timed(_kernels.forward_numpy, X, packed, args.repeat)
        t_nb, y_nb = timed(_kernels.forward_numba, X, packed, args.repeat)
        diff = float(np.max(np.abs(y_np - y_nb)))
        print(f"{name:<16} {net.depth:>6} {t_np:>9.4f} {t_nb:>9.4f} {t_np / t_nb:>7.1f}x  {diff:.1e}")


if __name__ == "__main__":
    main()
