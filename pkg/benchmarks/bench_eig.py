"""Time the compiled Jacobi kernel against the pure-Python fallback.

Run with ``python3 benchmarks/bench_eig.py [batch]``.  Both backends see
the same random symmetric batches; eigenvalue agreement is reported next to
the timings.
"""

import argparse
import time

import numpy as np

from mmwave import _jacobi_py, eig


def random_symmetric(rng, batch, n):
    a = rng.uniform(-10.0, 10.0, (batch, n, n))
    return np.ascontiguousarray(np.triu(a) + np.swapaxes(np.triu(a, 1), 1, 2))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("batch", nargs="?", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"active backend: {eig.BACKEND}")
    print(f"{'n':>3} {'batch':>8} {'compiled [s]':>13} {'python [s]':>11} {'speedup':>8} {'max |dw|':>10}")
    for n in (2, 3, 12):
        batch = args.batch if n < 12 else max(1, args.batch // 20)
        a = random_symmetric(rng, batch, n)
        call = (a, False, eig.MAX_SWEEPS, eig.OFF_TOL)
        t_py = best_of(lambda: _jacobi_py.jacobi_batch(*call), args.repeat)
        w_py = _jacobi_py.jacobi_batch(*call)[0]
        if eig.BACKEND == "cython":
            t_c = best_of(lambda: eig._kernel.jacobi_batch(*call), args.repeat)
            dw = float(np.max(np.abs(eig._kernel.jacobi_batch(*call)[0] - w_py)))
            print(f"{n:>3} {batch:>8} {t_c:>13.4f} {t_py:>11.4f} {t_py / t_c:>8.1f} {dw:>10.1e}")
        else:
            print(f"{n:>3} {batch:>8} {'n/a':>13} {t_py:>11.4f} {'n/a':>8} {'n/a':>10}")


if __name__ == "__main__":
    main()
