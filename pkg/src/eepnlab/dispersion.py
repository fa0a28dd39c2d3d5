"""Chromatic dispersion as an all-pass operator and its FIR inverse.

Sign convention, fixed repo-wide: the fiber multiplies the spectrum by
H(f) = exp(-j*pi*lambda^2*D*L*f^2/c) on the baseband frequency grid; the
electrical inverse uses the opposite sign. The truncated-inverse FIR tap
design below has frequency response approaching exp(+j*pi*lambda^2*D*L*
f^2/c), i.e. it undoes the fiber.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .analytics import FiberSpec
from .modem import ComplexSignal

_DIRECTIONS = {"fiber": +1.0, "inverse": -1.0}


@dataclass(frozen=True)
class CdOperator:
    """Frequency-domain chromatic dispersion, forward or inverted."""

    fiber: FiberSpec
    direction: str = "fiber"

    def __post_init__(self):
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"direction must be one of {sorted(_DIRECTIONS)}")

    @property
    def sign(self) -> float:
        return _DIRECTIONS[self.direction]

    def inverted(self) -> "CdOperator":
        other = "inverse" if self.direction == "fiber" else "fiber"
        return CdOperator(self.fiber, other)


@dataclass(frozen=True, eq=False)
class FirEqualizer:
    """Sample-spaced FIR chromatic dispersion equalizer."""

    taps: np.ndarray
    tap_spacing: float

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.complex128)
        object.__setattr__(self, "taps", taps)
        if taps.size < 1 or taps.size % 2 == 0:
            raise ValueError("tap count must be odd and >= 1")
        if not (self.tap_spacing > 0):
            raise ValueError("tap_spacing must be > 0")

    @property
    def n_taps(self) -> int:
        return self.taps.size

    @property
    def edge_symbols(self) -> int:
        """Symbols to exclude at each end of a filtered block, for a
        2-sample-per-symbol waveform: ceil(n_taps / 2)."""
        return -(-self.n_taps // 2)


def apply_cd_frequency_domain(signal: ComplexSignal, op: CdOperator) -> ComplexSignal:
    """Apply the dispersion (or its inverse) via a single DFT.

    Multiplies the discrete spectrum by exp(-j*sign*pi*lambda^2*D*L*
    f^2/c) with f on the centered DFT grid of the sampled signal. Unit
    magnitude at every frequency, so total energy is preserved. Zero
    net dispersion returns the input unchanged.
    """
    fiber = op.fiber
    if fiber.total_dispersion == 0.0:
        return signal
    if len(signal) < 2:
        raise ValueError("signal must have at least 2 samples")
    f = np.fft.fftfreq(len(signal), d=signal.sample_period)
    phase = (
        math.pi
        * fiber.wavelength_lambda**2
        * fiber.dispersion_D
        * fiber.length_L
        / fiber.light_speed_c
    ) * f**2
    spectrum = np.fft.fft(signal.samples) * np.exp(-1j * op.sign * phase)
    return ComplexSignal(np.fft.ifft(spectrum), signal.sample_period)


def design_fir_equalizer(fiber: FiberSpec, sample_period: float) -> FirEqualizer:
    """Truncated-inverse FIR design for receiver-side CD equalization.

    Tap count N = 2*floor(|D| lambda^2 L / (2 c T^2)) + 1 and taps

        a_k = sqrt(j c T^2 / (D lambda^2 L))
              * exp(-j pi c T^2 k^2 / (D lambda^2 L))

    for k in [-(N-1)/2, (N-1)/2]. All taps share one magnitude. Zero
    accumulated dispersion degenerates to a single unit tap.
    """
    if sample_period <= 0:
        raise ValueError("sample_period must be > 0")
    dl = fiber.total_dispersion
    if dl == 0.0:
        return FirEqualizer(np.ones(1, dtype=np.complex128), sample_period)
    c = fiber.light_speed_c
    lam2 = fiber.wavelength_lambda**2
    half = int(abs(dl) * lam2 / (2.0 * c * sample_period**2))
    if half == 0:
        return FirEqualizer(np.ones(1, dtype=np.complex128), sample_period)
    k = np.arange(-half, half + 1)
    denom = fiber.dispersion_D * lam2 * fiber.length_L
    scale = np.sqrt(1j * c * sample_period**2 / denom)
    taps = scale * np.exp(-1j * math.pi * c * sample_period**2 * k**2 / denom)
    return FirEqualizer(taps, sample_period)


def apply_fir(signal: ComplexSignal, eq: FirEqualizer) -> ComplexSignal:
    """Center-aligned linear convolution with the equalizer taps.

    Output length equals input length; the group delay of the odd,
    center-indexed tap vector is compensated so symbol timing is kept.
    The first/last ``eq.edge_symbols`` symbols of the block carry edge
    transients and must be excluded from BER counting by the caller.
    """
    if len(signal) <= eq.n_taps:
        raise ValueError("signal must be longer than the equalizer")
    filtered = fftconvolve(signal.samples, eq.taps, mode="same")
    return ComplexSignal(filtered, signal.sample_period)
