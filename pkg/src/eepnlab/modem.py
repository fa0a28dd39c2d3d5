"""Bit source, constellation mapping, waveform shaping and BER counting."""

import functools
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import prbs16_period_kernel
from .analytics import SymbolClock

PRBS16_PERIOD = 65535
DEFAULT_PRBS_SEED = 0xACE1


@dataclass(frozen=True)
class ComplexSignal:
    """Uniformly sampled complex baseband waveform."""

    samples: np.ndarray
    sample_period: float

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", samples)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a nonempty 1-D array")
        if not (self.sample_period > 0 and math.isfinite(self.sample_period)):
            raise ValueError("sample_period must be finite and > 0")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")

    def __len__(self):
        return self.samples.size

    @property
    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))


@dataclass(frozen=True, eq=False)
class Constellation:
    """Symbol alphabet with Gray bit labels.

    ``points[i]`` carries the integer bit pattern ``labels[i]``. Mean
    symbol energy is 1; for PSK all points sit on the unit circle.
    """

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.complex128)
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)
        n = points.size
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError("constellation order must be a power of two >= 2")
        if labels.size != n or set(labels.tolist()) != set(range(n)):
            raise ValueError("labels must be a permutation of 0..order-1")
        if not math.isclose(float(np.mean(np.abs(points) ** 2)), 1.0, rel_tol=1e-12):
            raise ValueError("mean symbol energy must be 1")
        inv = np.empty(n, dtype=np.int64)
        inv[labels] = np.arange(n)
        object.__setattr__(self, "_label_to_index", inv)

    @property
    def order(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    @classmethod
    @functools.lru_cache(maxsize=None)
    def qpsk(cls) -> "Constellation":
        """Gray-coded QPSK: 00 -> (+1+j)/sqrt2, 01 -> (-1+j)/sqrt2,
        11 -> (-1-j)/sqrt2, 10 -> (+1-j)/sqrt2."""
        pts = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j], dtype=np.complex128)
        pts /= math.sqrt(2.0)
        return cls(points=pts, labels=np.array([0b00, 0b01, 0b11, 0b10]))

    @classmethod
    def for_order(cls, order: int) -> "Constellation":
        if order == 4:
            return cls.qpsk()
        raise ValueError(f"unsupported constellation order {order} (QPSK only)")


@functools.lru_cache(maxsize=64)
def _prbs16_period(seed: int) -> np.ndarray:
    out = prbs16_period_kernel(seed)
    out.setflags(write=False)
    return out


def prbs16(length: int, seed: int = DEFAULT_PRBS_SEED) -> np.ndarray:
    """Maximal-length PRBS bits from the x^16+x^14+x^13+x^11+1 LFSR.

    Period is exactly 2^16-1 = 65535 for every nonzero 16-bit seed; the
    sequence is cycled to the requested length.
    """
    if not (0 < seed <= 0xFFFF):
        raise ValueError("seed must be a nonzero 16-bit state")
    if length < 1:
        raise ValueError("length must be >= 1")
    period = _prbs16_period(seed)
    if length <= PRBS16_PERIOD:
        return period[:length].copy()
    reps = -(-length // PRBS16_PERIOD)
    return np.tile(period, reps)[:length]


def map_symbols(bits: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Gray-map a bit stream onto constellation symbols (MSB first)."""
    bits = np.asarray(bits)
    k = constellation.bits_per_symbol
    if bits.size == 0 or bits.size % k != 0:
        raise ValueError(f"bit count must be a positive multiple of {k}")
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = bits.reshape(-1, k) @ weights
    return constellation.points[constellation._label_to_index[labels]]


def shape_waveform(symbols: np.ndarray, clock: SymbolClock) -> ComplexSignal:
    """Rectangular NRZ sample-and-hold: each symbol repeated
    samples_per_symbol times. Preserves mean power exactly."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    if symbols.size == 0:
        raise ValueError("symbol array must be nonempty")
    return ComplexSignal(
        samples=np.repeat(symbols, clock.samples_per_symbol),
        sample_period=clock.sample_period,
    )


def hard_decide(rx_symbols: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Minimum-distance decision; returns point indices."""
    rx = np.asarray(rx_symbols, dtype=np.complex128)
    return np.abs(rx[:, None] - constellation.points[None, :]).argmin(axis=1)


def demap_bits(point_indices: np.ndarray, constellation: Constellation) -> np.ndarray:
    k = constellation.bits_per_symbol
    labels = constellation.labels[point_indices]
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def decide_and_count(
    rx_symbols: np.ndarray,
    ref_bits: np.ndarray,
    constellation: Constellation,
    skip: int,
    skip_end: int = 0,
) -> tuple[int, int]:
    """Hard-decide symbols and count bit errors against the reference.

    Parameters
    ----------
    rx_symbols : array of complex
        CPE output at one sample per symbol.
    ref_bits : array of 0/1
        Transmitted bits, len = symbols * bits_per_symbol.
    constellation : Constellation
    skip : int
        Leading symbols excluded from counting (training, filter edges).
    skip_end : int
        Trailing symbols excluded (filter edge transients).

    Returns
    -------
    (n_bit_errors, n_bits_counted)
    """
    rx = np.asarray(rx_symbols, dtype=np.complex128)
    ref = np.asarray(ref_bits, dtype=np.uint8)
    k = constellation.bits_per_symbol
    n_sym = rx.size
    if ref.size != n_sym * k:
        raise ValueError("reference bit count does not match symbol count")
    if skip < 0 or skip_end < 0 or skip + skip_end >= n_sym:
        raise ValueError("skip region must leave at least one counted symbol")
    rx_bits = demap_bits(hard_decide(rx, constellation), constellation)
    lo = skip * k
    hi = (n_sym - skip_end) * k
    n_err = int(np.count_nonzero(rx_bits[lo:hi] != ref[lo:hi]))
    return n_err, hi - lo
