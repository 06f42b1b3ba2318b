"""Time the numba kernels against their numpy twins, then a whole SOTA solve per backend.

    python3 benchmarks/bench_backends.py [--sizes 64,512,4096] [--repeat 200] [--width 40]

The end-to-end part re-imports the package in a subprocess with
STOCHROUTE_BACKEND set, since the flag is read at import time.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from stochroute import kernels


def _cdf(rng, n):
    p = rng.random(n)
    c = np.cumsum(p / p.sum())
    c[-1] = 1.0
    return c


def _cases(rng, n):
    pmf = rng.random(n)
    pmf /= pmf.sum()
    cx, cy = _cdf(rng, n), _cdf(rng, n)
    return {
        "conv_direct": (pmf[:48].copy(), pmf.copy()),
        "first_violation": (cx, 3, cy, 0, 1e-12),
        "meet": (cx, 3, cy, 0),
        "relax": (cx, 3, cy, 0, 1e-12),
        "tail_of_sum": (pmf, 2, cy, 5, n),
        "quantile": (cx, 3, 0.95, 1e-12),
        "upper_tail_mean": (pmf, 2, 2 + n // 2),
    }


def bench_kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    print(f"{'kernel':18s} {'n':>6s} {'numpy us':>10s} {'numba us':>10s} {'speedup':>8s}")
    for n in sizes:
        for name, args in _cases(rng, n).items():
            fn_np = kernels.NUMPY_KERNELS[name]
            fn_nb = kernels.NUMBA_KERNELS[name]
            fn_nb(*args)  # compile / load cache outside the timing
            t_np = min(timeit.repeat(lambda: fn_np(*args), number=repeat, repeat=3)) / repeat
            t_nb = min(timeit.repeat(lambda: fn_nb(*args), number=repeat, repeat=3)) / repeat
            print(f"{name:18s} {n:6d} {1e6 * t_np:10.2f} {1e6 * t_nb:10.2f} {t_np / t_nb:8.2f}")


_E2E = """
import time
from stochroute import BACKEND, sota
from stochroute.generator import Family, GenSpec, generate
inst = generate(GenSpec({width}, Family.GAMMA, 1))
sota.solve_sota(generate(GenSpec(3, Family.GAMMA, 1)))  # warm up
t = time.perf_counter()
r = sota.solve_sota(inst)
print(BACKEND, round(time.perf_counter() - t, 3), r.stats.expansions)
"""


def bench_end_to_end(width):
    print(f"\nSOTA on g{width}G (backend, seconds, expansions)")
    for backend in ("numpy", "numba"):
        env = dict(os.environ, STOCHROUTE_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", _E2E.format(width=width)], env=env,
                             capture_output=True, text=True, check=True)
        print(" ", out.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,512,4096")
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--width", type=int, default=40)
    args = ap.parse_args()
    if not kernels.NUMBA_KERNELS:
        sys.exit("numba is not installed; nothing to compare")
    bench_kernels([int(s) for s in args.sizes.split(",")], args.repeat)
    bench_end_to_end(args.width)


if __name__ == "__main__":
    main()
