"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--N 4] [--m 4] [--batch 64] [--repeat 3]

Both backends must return identical integers; the script aborts otherwise.
"""
import argparse
import random
import sys
import time

from lossylab import kernels
from lossylab._pykernels import mixture_batch as py_batch


def random_instance(N, m, K, batch, seed):
    rng = random.Random(seed)
    rows = [[rng.randrange(0, 16) for _ in range(K)] for _ in range(N ** m)]
    ws = [[[rng.randrange(0, 8) for _ in range(N)] for _ in range(m)] for _ in range(batch)]
    return kernels.KernelMatrix(rows, N, m), ws


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--K", type=int, default=8)
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    km, ws = random_instance(args.N, args.m, args.K, args.batch, args.seed)
    t_py, ref = best_of(lambda: py_batch(km.rows, km.N, km.m, ws), args.repeat)
    print(f"N={args.N} m={args.m} K={args.K} batch={args.batch} rows={args.N ** args.m}")
    print(f"python    {t_py * 1e3:10.2f} ms")
    if kernels.BACKEND != "compiled":
        print("compiled  unavailable (extension not built or LOSSYLAB_PURE set)")
        return 0
    t_c, got = best_of(lambda: kernels.mixture_batch(km, ws, backend="compiled"), args.repeat)
    if [list(map(int, r)) for r in got] != ref:
        print("backends disagree", file=sys.stderr)
        return 1
    print(f"compiled  {t_c * 1e3:10.2f} ms")
    print(f"speedup   {t_py / t_c:10.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
