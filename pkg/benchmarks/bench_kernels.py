"""Time the numba kernels against their numpy twins.

Run with ``python3 benchmarks/bench_kernels.py [--repeat R]``. Each kernel is
called once first so JIT compilation is excluded, then outputs are compared
and the median of ``R`` timed calls is printed per implementation.
"""
import argparse
import statistics
import time

import numpy as np

from qpencil import kernels
from qpencil._accel import HAVE_NUMBA


def _inputs(rng, n):
    m = n // 2
    f = rng.normal(size=n) + 1j * rng.normal(size=n)
    mu = np.exp(-rng.uniform(0, 0.5, 4) + 1j * rng.uniform(-2, 2, 4))
    block = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    fext = np.zeros((n, n), dtype=np.complex128)
    fext[:m, m:] = block
    fext[m:, :m] = block.conj().T
    d = 8
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    small = np.zeros((d, d), dtype=np.complex128)
    small[: d // 2, d // 2:] = a[: d // 2, : d // 2]
    small[d // 2:, : d // 2] = small[: d // 2, d // 2:].conj().T
    diag, off = kernels.swap_block_factors(small, 0.05)
    big = rng.normal(size=(d * d, d * d)) + 1j * rng.normal(size=(d * d, d * d))
    return {
        "hankel": (f, 0, m),
        "vandermonde": (mu, m),
        "modified_swap": (fext,),
        "swap_channel": (diag, off, rho, rho),
        "partial_trace_first": (big, d, d),
    }


def _median_time(func, args, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=50)
    parser.add_argument("--n", type=int, default=32, help="signal length for Hankel-sized kernels")
    args = parser.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba not importable; only the numpy versions exist")
    rng = np.random.default_rng(0)
    inputs = _inputs(rng, args.n)
    print(f"{'kernel':<22}{'numpy [us]':>12}{'numba [us]':>12}{'speedup':>10}{'max diff':>12}")
    for name, (np_fn, nb_fn) in kernels.KERNELS.items():
        call_args = inputs[name]
        ref = np_fn(*call_args)
        t_np = _median_time(np_fn, call_args, args.repeat)
        if HAVE_NUMBA:
            out = nb_fn(*call_args)  # compile
            diff = float(np.max(np.abs(out - ref)))
            t_nb = _median_time(nb_fn, call_args, args.repeat)
            print(f"{name:<22}{t_np * 1e6:12.1f}{t_nb * 1e6:12.1f}{t_np / t_nb:10.2f}{diff:12.2e}")
        else:
            print(f"{name:<22}{t_np * 1e6:12.1f}{'-':>12}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
