"""Compare the compiled and pure-Python GF(2) elimination kernels.

    python benchmarks/bench_gf2.py [--repeat 5]

Workloads mirror what the library does: square (x|z) tableaus for
consistent-subgroup and fidelity computations, and tall outcome systems for
acceptance conditions.
"""

import argparse
import random
import sys
import timeit

from gsextract import _gf2_py

try:
    from gsextract import _gf2
except ImportError:
    _gf2 = None


def random_rows(count, nbits, payload, seed):
    rng = random.Random(seed)
    return [rng.getrandbits(nbits + payload) for _ in range(count)]


WORKLOADS = [
    # (label, rows, key bits, payload bits)
    ("tableau n=8", 8, 16, 8),
    ("tableau n=24", 24, 48, 24),
    ("tableau n=60", 60, 120, 60),
    ("outcomes 40x20", 40, 20, 1),
    ("outcomes 200x120", 200, 120, 1),
]


def bench(kernel, rows, nbits, repeat, number):
    times = timeit.repeat(lambda: kernel.rref(rows, nbits), repeat=repeat, number=number)
    return min(times) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=200)
    args = ap.parse_args(argv)
    if _gf2 is None:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation` first")
        return 1
    print(f"{'workload':<20}{'python [us]':>14}{'cython [us]':>14}{'speedup':>10}")
    for label, count, nbits, payload in WORKLOADS:
        rows = random_rows(count, nbits, payload, seed=count * 1000 + nbits)
        assert _gf2.rref(rows, nbits) == _gf2_py.rref(rows, nbits), label
        t_py = bench(_gf2_py, rows, nbits, args.repeat, args.number)
        t_cy = bench(_gf2, rows, nbits, args.repeat, args.number)
        print(f"{label:<20}{t_py * 1e6:>14.2f}{t_cy * 1e6:>14.2f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
