"""Time each kernel in the compiled core against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--x 1000000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from sqfap import _fallback
from sqfap.arith import primes_upto, sieve_mobius, unit_mask
from sqfap.characters import build_group

try:
    from sqfap import _core
except ImportError:
    _core = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(x):
    table = sieve_mobius(x)
    mu = table.mu
    primes = primes_upto(int(x**0.5) + 1)
    q = 1009
    group = build_group(q)
    angles = group.angle_table(list(range(1, 33)))
    return {
        "mobius_linear": lambda k: k.mobius_linear(x, primes),
        "mobius_segment": lambda k: k.mobius_segment(x, 2 * x, primes_upto(int((2 * x) ** 0.5) + 1)),
        "residue_counts": lambda k: k.residue_counts(mu, x, q),
        "convolution_class_weights": lambda k: k.convolution_class_weights(mu, x, q, unit_mask(q)),
        "character_buckets (32 chars)": lambda k: k.character_buckets(mu, x, q, angles, group.exponent),
        "lemma1_box_histogram": lambda k: k.lemma1_box_histogram(7, -11, 13, 60, 60, 60),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--x", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        print("compiled core not built; only the fallback is timed")
    print(f"x = {args.x}, best of {args.repeat}")
    print(f"{'kernel':<30}{'cython [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, run in cases(args.x).items():
        slow = best_of(lambda: run(_fallback), args.repeat)
        if _core is None:
            print(f"{name:<30}{'-':>12}{slow:>12.4f}{'-':>10}")
            continue
        a, b = run(_core), run(_fallback)
        assert np.array_equal(np.asarray(a), np.asarray(b)), name
        fast = best_of(lambda: run(_core), args.repeat)
        print(f"{name:<30}{fast:>12.4f}{slow:>12.4f}{slow / fast:>9.1f}x")


if __name__ == "__main__":
    main()
