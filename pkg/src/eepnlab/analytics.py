"""Closed-form model of equalization-enhanced phase noise (EEPN).

Implements the variance of the dispersion/phase-noise beat term, the
equivalent EEPN linewidth, the effective IF linewidth that an ideal
carrier-phase estimator has to fight, and the resulting QPSK BER floor,
plus the OSNR conventions used to calibrate the Monte Carlo runs.

All quantities are SI internally; helpers accept the usual engineering
units (ps/nm/km, km, nm).
"""

import math
from dataclasses import dataclass, field

from scipy.special import erfc

LIGHT_SPEED = 2.99792458e8
"""Vacuum light speed in m/s (CODATA)."""

OSNR_REF_BANDWIDTH = 12.5e9
"""Reference noise bandwidth for OSNR, Hz (the 0.1 nm convention)."""

# ps/(nm km) -> s/m^2
_D_ENG_TO_SI = 1e-12 / (1e-9 * 1e3)


def _require_nonneg_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"{name} must be finite and >= 0, got {v!r}")


@dataclass(frozen=True)
class FiberSpec:
    """Transmission fiber for the chromatic-dispersion all-pass model.

    dispersion_D is stored in SI (s/m^2); use :meth:`from_engineering`
    for the conventional ps/(nm km) input.
    """

    dispersion_D: float
    length_L: float
    wavelength_lambda: float = 1550e-9
    light_speed_c: float = field(default=LIGHT_SPEED)

    def __post_init__(self):
        if not math.isfinite(self.dispersion_D):
            raise ValueError("dispersion_D must be finite")
        if not (self.length_L >= 0 and math.isfinite(self.length_L)):
            raise ValueError("length_L must be finite and >= 0")
        if not (self.wavelength_lambda > 0):
            raise ValueError("wavelength_lambda must be > 0")
        if self.light_speed_c != LIGHT_SPEED:
            raise ValueError("light_speed_c is a fixed constant")

    @classmethod
    def from_engineering(cls, d_ps_nm_km, length_km, wavelength_nm=1550.0):
        return cls(
            dispersion_D=d_ps_nm_km * _D_ENG_TO_SI,
            length_L=length_km * 1e3,
            wavelength_lambda=wavelength_nm / 1e9,
        )

    @property
    def d_ps_nm_km(self) -> float:
        return self.dispersion_D / _D_ENG_TO_SI

    @property
    def length_km(self) -> float:
        return self.length_L / 1e3

    @property
    def total_dispersion(self) -> float:
        """D*L in s/m."""
        return self.dispersion_D * self.length_L


@dataclass(frozen=True)
class LaserSpec:
    """3-dB linewidth of one laser (Tx or LO), Hz."""

    linewidth_3db: float

    def __post_init__(self):
        _require_nonneg_finite(linewidth_3db=self.linewidth_3db)


@dataclass(frozen=True)
class SymbolClock:
    """Symbol period and the waveform oversampling factor."""

    symbol_period_Ts: float
    samples_per_symbol: int = 2

    def __post_init__(self):
        if not (self.symbol_period_Ts > 0 and math.isfinite(self.symbol_period_Ts)):
            raise ValueError("symbol_period_Ts must be finite and > 0")
        if self.samples_per_symbol < 1:
            raise ValueError("samples_per_symbol must be >= 1")

    @classmethod
    def from_rate(cls, symbol_rate_hz, samples_per_symbol=2):
        if symbol_rate_hz <= 0:
            raise ValueError("symbol_rate_hz must be > 0")
        return cls(1.0 / symbol_rate_hz, samples_per_symbol)

    @property
    def symbol_rate(self) -> float:
        return 1.0 / self.symbol_period_Ts

    @property
    def sample_period(self) -> float:
        return self.symbol_period_Ts / self.samples_per_symbol


def eepn_variance(fiber: FiberSpec, lo_side_linewidth: float, clock: SymbolClock) -> float:
    """Phase variance added by dispersion-enhanced laser phase noise.

    Parameters
    ----------
    fiber : FiberSpec
        Fiber whose accumulated dispersion D*L is unmatched against the
        laser in question.
    lo_side_linewidth : float
        3-dB linewidth (Hz) of the laser on the dispersion-unmatched
        side: the LO for receiver-side equalization, the Tx laser for
        transmitter-side pre-distortion.
    clock : SymbolClock

    Returns
    -------
    float
        Variance in rad^2: (pi lambda^2 / 2c) * D L df / Ts. Linear in
        each of D, L, df and 1/Ts.
    """
    _require_nonneg_finite(lo_side_linewidth=lo_side_linewidth)
    return (
        math.pi
        * fiber.wavelength_lambda**2
        / (2.0 * fiber.light_speed_c)
        * abs(fiber.dispersion_D)
        * fiber.length_L
        * lo_side_linewidth
        / clock.symbol_period_Ts
    )


def eepn_linewidth(fiber: FiberSpec, lo_side_linewidth: float, clock: SymbolClock) -> float:
    """Equivalent 3-dB linewidth of the EEPN term, Hz.

    Defined through sigma^2 = 2 pi df_EE Ts, i.e. the linewidth a Wiener
    laser would need to produce the same per-symbol variance.
    """
    var = eepn_variance(fiber, lo_side_linewidth, clock)
    return var / (2.0 * math.pi * clock.symbol_period_Ts)


def effective_linewidth(tx: LaserSpec, lo: LaserSpec, eepn_lw: float) -> float:
    """Effective IF linewidth: plain sum of Tx, LO and EEPN linewidths.

    Correlation between LO and EEPN contributions is neglected, which
    holds for very short spans or beyond roughly 80 km.
    """
    _require_nonneg_finite(eepn_lw=eepn_lw)
    return tx.linewidth_3db + lo.linewidth_3db + eepn_lw


def ber_floor(effective_lw: float, clock: SymbolClock) -> float:
    """OSNR-independent QPSK BER floor for a given effective linewidth.

    Evaluates 0.5*erfc(pi / (4*sqrt(2)*sigma_eff)) with
    sigma_eff^2 = 2 pi df_eff Ts. Monotone nondecreasing in df_eff,
    approaching 0.5 as df_eff grows without bound.
    """
    _require_nonneg_finite(effective_lw=effective_lw)
    if effective_lw == 0.0:
        return 0.0
    sigma = math.sqrt(2.0 * math.pi * effective_lw * clock.symbol_period_Ts)
    return 0.5 * float(erfc(math.pi / (4.0 * math.sqrt(2.0) * sigma)))


def osnr_to_es_n0(osnr_db: float, symbol_rate: float, ref_bandwidth: float = OSNR_REF_BANDWIDTH) -> float:
    """Convert OSNR (dB, 12.5 GHz reference) to a linear Es/N0 ratio.

    Single-polarization signal with noise counted in both polarization
    modes over the reference bandwidth:
    Es/N0 = 10^(OSNR/10) * 2 * B_ref / R_s.
    """
    if symbol_rate <= 0 or ref_bandwidth <= 0:
        raise ValueError("symbol_rate and ref_bandwidth must be > 0")
    if not math.isfinite(osnr_db):
        raise ValueError("osnr_db must be finite (the no-noise sentinel is handled upstream)")
    return 10.0 ** (osnr_db / 10.0) * 2.0 * ref_bandwidth / symbol_rate


def qpsk_ber_awgn(es_n0: float) -> float:
    """Ideal Gray-coded QPSK bit error rate over AWGN: 0.5*erfc(sqrt(Es/N0 / 2))."""
    _require_nonneg_finite(es_n0=es_n0)
    return 0.5 * float(erfc(math.sqrt(es_n0 / 2.0)))
