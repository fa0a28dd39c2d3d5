"""Stochastic processes: Wiener laser phase noise and OSNR-calibrated ASE.

Randomness flows through value-semantic :class:`RngStream` handles built
on the counter-based Philox generator, so every trial is reproducible
bit-for-bit and independent streams can be derived without coordination.
"""

import math
from dataclasses import dataclass

import numpy as np

from .analytics import LaserSpec, OSNR_REF_BANDWIDTH, osnr_to_es_n0
from .modem import ComplexSignal

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 mixing step; a bijection on 64-bit words."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream_id) pair addressing one Philox stream.

    Identical pairs reproduce identical draws bit-for-bit; distinct
    stream ids are statistically independent.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, tag: int) -> "RngStream":
        """Derive an independent child stream for one pipeline stage."""
        return RngStream(self.seed, splitmix64((self.stream_id ^ splitmix64(tag)) & _MASK64))


@dataclass(frozen=True)
class PhaseTrajectory:
    """Sampled phase random walk; increments are i.i.d. zero-mean Gaussian."""

    phases: np.ndarray
    sample_period: float

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=np.float64)
        object.__setattr__(self, "phases", phases)
        if phases.ndim != 1 or phases.size < 1:
            raise ValueError("phases must be a nonempty 1-D array")
        if not (self.sample_period > 0 and math.isfinite(self.sample_period)):
            raise ValueError("sample_period must be finite and > 0")

    def __len__(self):
        return self.phases.size


def gen_wiener_phase(
    n_samples: int, laser: LaserSpec, sample_period: float, rng: RngStream
) -> PhaseTrajectory:
    """Wiener phase noise from a white-frequency-noise laser model.

    theta[0] = 0 and increments are N(0, 2*pi*linewidth*sample_period).
    A zero-linewidth laser yields an exactly zero trajectory (and draws
    nothing from the stream).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if sample_period <= 0:
        raise ValueError("sample_period must be > 0")
    if laser.linewidth_3db == 0.0:
        return PhaseTrajectory(np.zeros(n_samples), sample_period)
    sigma = math.sqrt(2.0 * math.pi * laser.linewidth_3db * sample_period)
    increments = rng.generator().normal(0.0, sigma, n_samples - 1)
    phases = np.empty(n_samples)
    phases[0] = 0.0
    np.cumsum(increments, out=phases[1:])
    return PhaseTrajectory(phases, sample_period)


def _check_aligned(n_signal, t_signal, n_other, t_other):
    if n_signal != n_other:
        raise ValueError(f"length mismatch: {n_signal} vs {n_other}")
    if not math.isclose(t_signal, t_other, rel_tol=1e-12):
        raise ValueError(f"sample period mismatch: {t_signal} vs {t_other}")


def apply_phase(signal: ComplexSignal, phase: PhaseTrajectory, sign: int = +1) -> ComplexSignal:
    """Multiply by exp(j*sign*theta[k]); per-sample magnitude is preserved."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    _check_aligned(len(signal), signal.sample_period, len(phase), phase.sample_period)
    rotated = signal.samples * np.exp(1j * sign * phase.phases)
    return ComplexSignal(rotated, signal.sample_period)


def load_noise_for_osnr(
    signal: ComplexSignal,
    osnr_db: float,
    symbol_rate: float,
    samples_per_symbol: int,
    rng: RngStream,
) -> ComplexSignal:
    """Add circular complex Gaussian noise calibrated to a target OSNR.

    The injected noise is white over the simulation bandwidth
    (samples_per_symbol * symbol_rate) with per-sample power
    P_signal / EsN0, so the measured per-sample SNR of the output equals
    osnr_to_es_n0(osnr_db, symbol_rate). ``osnr_db = inf`` is the
    no-noise sentinel and returns the signal unchanged.
    """
    if math.isinf(osnr_db) and osnr_db > 0:
        return signal
    sim_rate = samples_per_symbol * symbol_rate
    if not math.isclose(1.0 / signal.sample_period, sim_rate, rel_tol=1e-9):
        raise ValueError("signal sample rate disagrees with samples_per_symbol * symbol_rate")
    p_signal = signal.mean_power
    if p_signal <= 0.0:
        raise ValueError("signal has zero power; cannot calibrate OSNR")
    es_n0 = osnr_to_es_n0(osnr_db, symbol_rate, OSNR_REF_BANDWIDTH)
    sigma_quad = math.sqrt(p_signal / es_n0 / 2.0)
    g = rng.generator()
    noise = g.normal(0.0, sigma_quad, (2, len(signal)))
    return ComplexSignal(signal.samples + noise[0] + 1j * noise[1], signal.sample_period)
