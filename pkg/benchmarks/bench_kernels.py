"""Compiled vs pure-Python Hardy kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends evaluate the same closed-form sums; the script checks they
agree before timing them.
"""

import argparse
import timeit

import numpy as np

from ricompact import _kernels_py
from ricompact.kernelops import ProfileJ

try:
    from ricompact import _kernels
except ImportError:  # extension not built
    _kernels = None


def workload(nf=200, nc=40, nt=2000, seed=0):
    rng = np.random.default_rng(seed)
    J = ProfileJ.power(0.5)
    edges = np.concatenate(([0.0], np.geomspace(1e-8, 1.0, nc)))
    values = rng.exponential(1.0, (nf, nc))
    t = np.geomspace(1e-10, 1.0, nt)
    return J.lam(t), J.lam(edges[:-1]), J.lam(edges[1:]), values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    lam_t, lo, hi, values = workload()
    backends = {"python": _kernels_py}
    if _kernels is not None:
        backends["cython"] = _kernels
    ref = None
    for name, mod in backends.items():
        for j in (1, 3):
            out = mod.hardy_sum_batch(lam_t, lo, hi, values, j)
            if ref is not None and j == 3:
                assert np.allclose(out, ref, rtol=1e-12, atol=0)
            if j == 3:
                ref = out
    print(f"{'backend':8s} {'j':>2s} {'batch (ms)':>11s} {'single (us)':>12s}")
    for name, mod in backends.items():
        for j in (1, 3):
            tb = min(timeit.repeat(lambda: mod.hardy_sum_batch(lam_t, lo, hi, values, j),
                                   number=1, repeat=args.repeat))
            ts = min(timeit.repeat(lambda: mod.hardy_sum(lam_t, lo, hi, values[0], j),
                                   number=20, repeat=args.repeat)) / 20
            print(f"{name:8s} {j:2d} {tb * 1e3:11.2f} {ts * 1e6:12.1f}")


if __name__ == "__main__":
    main()
