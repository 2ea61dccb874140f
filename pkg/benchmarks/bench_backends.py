"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_backends.py [--sizes 1000,20000,200000] [--repeat 3]

Each kernel is run on identical inputs under both backends; outputs are
checked for equality and the best of ``--repeat`` wall times is reported.
"""
import argparse
import time

import numpy as np

from regulus._backend import get


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(n, rng):
    a8 = rng.integers(0, 5, n).astype(np.uint8)
    b8 = rng.integers(0, 5, n).astype(np.uint8)
    p = 2**31 - 1
    a32 = rng.integers(0, p, n).astype(np.uint32)
    b32 = rng.integers(0, p, n).astype(np.uint32)
    yield "ntt_mul m=5", lambda k: k.ntt_mul(a8, b8, 5, n)
    yield "ntt_mul m=2^31-1", lambda k: k.ntt_mul(a32, b32, p, n)
    if n <= 20000:
        yield "direct_mul m=5", lambda k: k.direct_mul(a8, b8, 5, n)
    yield "partition_recurrence k=4 m=5", lambda k: k.partition_recurrence(4, 5, n)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,20000,200000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        compiled = get("compiled")
    except ImportError:
        raise SystemExit("compiled extension not built; run `pip install --no-build-isolation -e .` first")
    python = get("python")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32} {'n':>9} {'compiled s':>11} {'python s':>10} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        for name, fn in cases(n, rng):
            tc, oc = best_time(lambda: fn(compiled), args.repeat)
            tp, op = best_time(lambda: fn(python), args.repeat)
            if not np.array_equal(np.asarray(oc), np.asarray(op)):
                raise SystemExit(f"{name} n={n}: backends disagree")
            print(f"{name:32} {n:>9} {tc:>11.4f} {tp:>10.4f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
