"""Compare the numba-compiled kernels against the pure-Python fallback.

Usage:
    python benchmarks/bench_kernels.py [n_symbols]

The same comparison applies package-wide through the environment flag:
EEPNLAB_NO_NUMBA=1 forces every kernel onto the fallback path.
"""

import sys
import time

import numpy as np

from eepnlab._kernels import (
    _lms_cpe_loop,
    _prbs16_period_loop,
    backend_name,
    lms_cpe_kernel,
    prbs16_period_kernel,
)
from eepnlab.modem import Constellation


def time_call(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_lms(n_symbols):
    rng = np.random.default_rng(0)
    points = Constellation.qpsk().points
    symbols = points[rng.integers(0, 4, n_symbols)]
    noisy = symbols * np.exp(1j * rng.normal(0, 0.1, n_symbols))
    train = symbols[:500]

    if backend_name() == "numba":
        lms_cpe_kernel(noisy[:64], train[:64], points, 1.0 + 0.0j, 0.2)  # JIT warmup
    t_active, (y_active, _) = time_call(lms_cpe_kernel, noisy, train, points, 1.0 + 0.0j, 0.2)
    t_py, (y_py, _) = time_call(_lms_cpe_loop, noisy, train, points, 1.0 + 0.0j, 0.2, repeats=1)
    assert np.allclose(y_active, y_py), "backends disagree"
    return t_active, t_py


def bench_prbs():
    if backend_name() == "numba":
        prbs16_period_kernel(0xACE1)
    t_active, a = time_call(prbs16_period_kernel, 0xACE1)
    t_py, b = time_call(_prbs16_period_loop, 0xACE1, repeats=1)
    assert np.array_equal(a, b), "backends disagree"
    return t_active, t_py


def main():
    n_symbols = int(sys.argv[1]) if len(sys.argv) > 1 else 500_000
    print(f"active backend: {backend_name()}  (EEPNLAB_NO_NUMBA toggles the fallback)")

    t_active, t_py = bench_lms(n_symbols)
    rate = n_symbols / t_active / 1e6
    print(
        f"lms_cpe   {n_symbols:>9d} symbols: {backend_name()}={t_active * 1e3:8.2f} ms "
        f"({rate:6.1f} Msym/s)   python={t_py * 1e3:8.2f} ms   speedup x{t_py / t_active:,.0f}"
    )

    t_active, t_py = bench_prbs()
    print(
        f"prbs16        65535 bits:    {backend_name()}={t_active * 1e3:8.2f} ms"
        f"                python={t_py * 1e3:8.2f} ms   speedup x{t_py / t_active:,.0f}"
    )


if __name__ == "__main__":
    main()
