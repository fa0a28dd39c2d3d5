"""Coherent front end and carrier phase estimation.

The CPE is the single-tap decision-directed LMS: trained on a known
prefix, then running on its own hard decisions. A decision-directed loop
is fourfold-degenerate for QPSK, so a persistent phase excursion can
re-lock it a quadrant away; :func:`anchor_phase_ambiguity` removes that
absorbing behaviour the way framed pilots do in practice, bounding the
cost of any cycle slip to a correction window while leaving the slip's
own symbol errors in place.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from ._kernels import lms_cpe_kernel
from .analytics import SymbolClock
from .modem import ComplexSignal, Constellation
from .noise import PhaseTrajectory, _check_aligned


@dataclass(frozen=True)
class LmsState:
    """Single complex tap plus loop configuration."""

    tap_w: complex = 1.0 + 0.0j
    step_mu: float = 0.2
    training_len: int = 500

    def __post_init__(self):
        if not (0.0 < self.step_mu < 1.0):
            raise ValueError("step_mu must lie in (0, 1)")
        if not (math.isfinite(self.tap_w.real) and math.isfinite(self.tap_w.imag)):
            raise ValueError("tap_w must be finite")
        if self.training_len < 0:
            raise ValueError("training_len must be >= 0")


def mix_with_lo(signal: ComplexSignal, lo_phase: PhaseTrajectory) -> ComplexSignal:
    """Ideal homodyne downconversion: out[k] = in[k] * exp(-j*theta_LO[k])."""
    _check_aligned(len(signal), signal.sample_period, len(lo_phase), lo_phase.sample_period)
    return ComplexSignal(
        signal.samples * np.exp(-1j * lo_phase.phases), signal.sample_period
    )


def downsample_to_symbols(signal: ComplexSignal, clock: SymbolClock, offset: int = 0) -> np.ndarray:
    """Decimate the waveform to one sample per symbol."""
    sps = clock.samples_per_symbol
    if not (0 <= offset < sps):
        raise ValueError("offset must satisfy 0 <= offset < samples_per_symbol")
    return signal.samples[offset::sps].copy()


def cpe_lms(
    symbols: np.ndarray,
    reference_prefix: np.ndarray,
    state: LmsState,
    constellation: Constellation | None = None,
) -> tuple[np.ndarray, LmsState]:
    """Run the single-tap LMS over a symbol block.

    The update is y[n] = w[n]*x[n], e[n] = d[n] - y[n] and
    w[n+1] = w[n] + mu*e[n]*conj(x[n]), with d[n] the known training
    symbol while n < training_len and the hard decision on y[n] after.

    When a training prefix is present the initial tap is the
    least-squares one-tap fit over the prefix,
    w0 = sum(d*conj(x)) / sum(|x|^2), which resolves the fourfold phase
    ambiguity deterministically; with training_len = 0 the tap starts
    from ``state.tap_w``.

    Returns the corrected symbols and the final state.
    """
    x = np.ascontiguousarray(symbols, dtype=np.complex128)
    if x.size == 0:
        raise ValueError("symbol array must be nonempty")
    prefix = np.ascontiguousarray(reference_prefix, dtype=np.complex128)
    if prefix.size != state.training_len or prefix.size > x.size:
        raise ValueError("reference prefix must have length training_len <= symbol count")
    if state.training_len > 0:
        denom = float(np.sum(np.abs(x[: state.training_len]) ** 2))
        if denom == 0.0:
            raise ValueError("training prefix has zero power")
        w0 = complex(np.sum(prefix * np.conj(x[: state.training_len])) / denom)
    else:
        w0 = complex(state.tap_w)
    y, w_final = lms_cpe_kernel(x, prefix, constellation_points(constellation), w0, state.step_mu)
    return y, replace(state, tap_w=complex(w_final))


def constellation_points(constellation: Constellation | None) -> np.ndarray:
    if constellation is None:
        constellation = Constellation.qpsk()
    return np.ascontiguousarray(constellation.points, dtype=np.complex128)


def anchor_phase_ambiguity(
    symbols: np.ndarray,
    reference: np.ndarray,
    window: int = 32,
    smooth: int = 9,
    fold: int = 4,
) -> np.ndarray:
    """Pilot-style quadrant tracking after the CPE.

    Correlates the CPE output against the known reference over blocks of
    ``window`` symbols, smooths the complex correlators over ``smooth``
    neighbouring blocks, rounds the smoothed angle to the nearest
    2*pi/fold rotation and removes it per block. A re-locked (slipped)
    stretch is de-rotated after roughly window*smooth/2 symbols, so a
    slip costs a bounded burst of errors instead of the rest of the
    block; short excursions stay in the error count.

    ``window = 0`` disables anchoring.
    """
    y = np.asarray(symbols, dtype=np.complex128)
    if window == 0:
        return y.copy()
    if window < 1 or smooth < 1 or smooth % 2 == 0:
        raise ValueError("window must be >= 1 and smooth an odd count >= 1")
    ref = np.asarray(reference, dtype=np.complex128)
    if ref.size != y.size:
        raise ValueError("reference must match the symbol count")
    n = y.size
    n_win = n // window
    if n_win == 0:
        return y.copy()
    corr = (y[: n_win * window] * np.conj(ref[: n_win * window])).reshape(n_win, window).sum(axis=1)
    if smooth > 1:
        corr = np.convolve(corr, np.ones(smooth), mode="same")
    step = 2.0 * math.pi / fold
    m = np.round(np.angle(corr) / step).astype(np.int64) % fold
    rotor = np.exp(-1j * step * m)
    out = y.copy()
    out[: n_win * window] = (out[: n_win * window].reshape(n_win, window) * rotor[:, None]).ravel()
    out[n_win * window :] *= rotor[-1]
    return out
