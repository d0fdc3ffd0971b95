"""Compare the compiled kernels with the pure-Python fallback.

Kernel-level timings call both modules directly; the end-to-end timing runs a
fixed LDU workload in a subprocess per backend (selected via PADOP_BACKEND).

    python benchmarks/bench_kernels.py [--repeat 5] [--n 8]
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from padop._backend import load_backend, powers

WORKLOAD = """
import random, time
from padop.linalg import ldu_decompose
from padop.sampling import random_matrix
rng = random.Random(1)
mats = [random_matrix(rng, 5, {n}) for _ in range(200)]
t0 = time.perf_counter()
for A in mats:
    ldu_decompose(A)
print(time.perf_counter() - t0)
"""


def _raw(rng, p, prec):
    u = rng.randrange(1, p**prec)
    while u % p == 0:
        u = rng.randrange(1, p**prec)
    return (rng.randint(-2, 2), u, prec)


def kernel_cases(p, n, prec, seed=0):
    rng = random.Random(seed)
    pw = powers(p)
    a, b = _raw(rng, p, prec), _raw(rng, p, prec)
    A = [[_raw(rng, p, prec) for _ in range(n)] for _ in range(n)]
    B = [[_raw(rng, p, prec) for _ in range(n)] for _ in range(n)]
    x = [_raw(rng, p, prec) for _ in range(n * n)]
    y = [_raw(rng, p, prec) for _ in range(n * n)]
    return {
        "add x1000": lambda K: [K.add(p, pw, a, b) for _ in range(1000)],
        "mul x1000": lambda K: [K.mul(p, pw, a, b) for _ in range(1000)],
        "div x1000": lambda K: [K.div(p, pw, a, b) for _ in range(1000)],
        f"dot len {n * n}": lambda K: K.dot(p, pw, x, y),
        f"matmul {n}x{n}": lambda K: K.matmul(p, pw, A, B),
        f"axpy len {n * n}": lambda K: K.axpy(p, pw, list(y), a, x),
    }


def end_to_end(backend, n):
    env = dict(os.environ, PADOP_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", WORKLOAD.format(n=n)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=8, help="matrix size")
    ap.add_argument("-p", type=int, default=5)
    ap.add_argument("--prec", type=int, default=32)
    args = ap.parse_args(argv)

    py = load_backend("python")
    try:
        cy = load_backend("cython")
    except ImportError:
        print("compiled kernels are not built; nothing to compare")
        return 1

    print(f"p = {args.p}, precision = {args.prec}, best of {args.repeat}")
    print(f"{'kernel':<18}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for name, fn in kernel_cases(args.p, args.n, args.prec).items():
        tp = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<18}{tp:>14.3f}{tc:>14.3f}{tp / tc:>9.2f}x")
    tp, tc = end_to_end("python", args.n), end_to_end("cython", args.n)
    print(f"{'200 LDU ' + str(args.n) + 'x' + str(args.n):<18}{tp * 1e3:>14.1f}{tc * 1e3:>14.1f}{tp / tc:>9.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
