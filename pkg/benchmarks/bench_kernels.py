"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-``repeat`` wall time for each
backend and the speedup.  Results are also checked for bit-for-bit equality.
"""

import argparse
import time

import numpy as np

from hhverify import _kernels
from hhverify.matrix import permutation_table


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    a12 = rng.standard_normal((12, 12))
    yield "permanent N=12", lambda b: _kernels.permanent_ryser(a12, b)

    a7 = rng.standard_normal((7, 7))
    perms, signs = permutation_table(7)
    yield "immanant N=7", lambda b: _kernels.weighted_permutation_sum(a7, perms, signs, b)

    xs = np.sort(rng.uniform(0.0, 5.0, (20000, 5)), axis=1)
    fs = np.exp(-xs)
    yield "divided differences 20000x5", lambda b: _kernels.newton_divdiff_batch(xs, fs, b)

    # the per-tuple call made by the scalar probes
    x1, f1 = xs[:1], fs[:1]
    yield "divided differences 1x5 (x1000)", lambda b: [_kernels.newton_divdiff_batch(x1, f1, b) for _ in range(1000)][-1]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels are not built; only the Python backend is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<30}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}  equal")
    for name, fn in cases(rng):
        times, outs = [], []
        for b in backends:
            t, out = best_of(lambda: fn(b), args.repeat)
            times.append(t)
            outs.append(np.asarray(out))
        speed = times[0] / times[-1] if len(times) > 1 else 1.0
        equal = all(np.array_equal(outs[0], o) for o in outs[1:])
        print(f"{name:<30}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + f"{speed:>9.1f}x  {equal}")


if __name__ == "__main__":
    main()
