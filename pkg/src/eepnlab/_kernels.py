"""Hot inner loops, JIT-compiled with numba when available.

The two kernels here are the only per-symbol sequential loops in the
package: the decision-directed LMS recursion and the PRBS shift register.
Everything else is vectorized numpy and needs no compilation.

Set ``EEPNLAB_NO_NUMBA=1`` to force the pure-Python reference loops
(bit-identical results, much slower). ``benchmarks/bench_kernels.py``
compares the two paths.
"""

import os

import numpy as np


def numba_requested() -> bool:
    return os.environ.get("EEPNLAB_NO_NUMBA", "").strip().lower() not in (
        "1",
        "true",
        "yes",
    )


def _lms_cpe_loop(x, train, points, w0, mu):
    """Single-tap decision-directed LMS.

    y[n] = w[n]*x[n]; e[n] = d[n] - y[n] with d[n] the known training
    symbol for n < len(train), afterwards the nearest constellation
    point to y[n]; w[n+1] = w[n] + mu*e[n]*conj(x[n]).
    """
    n = x.shape[0]
    n_train = train.shape[0]
    n_points = points.shape[0]
    y = np.empty(n, dtype=np.complex128)
    w = w0
    for i in range(n):
        yi = w * x[i]
        y[i] = yi
        if i < n_train:
            d = train[i]
        else:
            best = 0
            best_dist = abs(yi - points[0])
            for k in range(1, n_points):
                dist = abs(yi - points[k])
                if dist < best_dist:
                    best_dist = dist
                    best = k
            d = points[best]
        e = d - yi
        w = w + mu * e * np.conj(x[i])
    return y, w


def _prbs16_period_loop(seed):
    """One full period of the x^16+x^14+x^13+x^11+1 Fibonacci LFSR.

    Emits the register LSB, then shifts right with the feedback bit
    entering at bit 15. Any nonzero 16-bit seed yields the maximal
    period of 65535.
    """
    out = np.empty(65535, dtype=np.uint8)
    state = seed
    for i in range(65535):
        out[i] = state & 1
        bit = (state ^ (state >> 2) ^ (state >> 3) ^ (state >> 5)) & 1
        state = (state >> 1) | (bit << 15)
    return out


_HAVE_NUMBA = False
if numba_requested():
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dep normally
        _HAVE_NUMBA = False

if _HAVE_NUMBA:
    _lms_cpe_jit = njit(cache=True)(_lms_cpe_loop)
    _prbs16_period_jit = njit(cache=True)(_prbs16_period_loop)
    lms_cpe_kernel = _lms_cpe_jit
    prbs16_period_kernel = _prbs16_period_jit
else:
    lms_cpe_kernel = _lms_cpe_loop
    prbs16_period_kernel = _prbs16_period_loop


def backend_name() -> str:
    """Active kernel backend, "numba" or "numpy"."""
    return "numba" if _HAVE_NUMBA else "numpy"
