"""End-to-end single-polarization QPSK link pipelines.

The block order is the whole point of the experiment:

post  PRBS -> map -> shape -> Tx phase -> fiber CD -> ASE -> LO mix
      -> Rx FIR CD equalizer -> downsample -> LMS CPE -> count
pre   PRBS -> map -> shape -> exact inverse-CD pre-distortion
      -> Tx phase -> fiber CD -> ASE -> LO mix -> downsample
      -> LMS CPE -> count

With receiver-side equalization the LO phase noise meets the
equalizer's dispersion and turns into EEPN; with transmitter-side
pre-distortion the roles of the two lasers swap. The "optical"
variant models in-line dispersion-compensating fiber: zero net
dispersion, no electronic CD stage, hence no EEPN at all.
"""

import math
from dataclasses import dataclass, field

from .analytics import (
    FiberSpec,
    LaserSpec,
    SymbolClock,
    ber_floor,
    eepn_linewidth,
    effective_linewidth,
)
from .dispersion import CdOperator, apply_cd_frequency_domain, apply_fir, design_fir_equalizer
from .modem import Constellation, decide_and_count, map_symbols, prbs16, shape_waveform
from .noise import RngStream, apply_phase, gen_wiener_phase, load_noise_for_osnr
from .rxdsp import LmsState, anchor_phase_ambiguity, cpe_lms, downsample_to_symbols, mix_with_lo

COMPENSATIONS = ("post", "pre", "optical")

# substream tags, one per stochastic pipeline stage
_TAG_TX_PHASE = 1
_TAG_LO_PHASE = 2
_TAG_ASE = 3
_TAG_PRBS = 4


@dataclass(frozen=True)
class LinkScenario:
    """One Monte Carlo trial: lasers, fiber, modem and budget."""

    compensation: str
    tx_laser: LaserSpec
    lo_laser: LaserSpec
    fiber: FiberSpec
    clock: SymbolClock
    constellation_order: int = 4
    osnr_db: float = math.inf
    n_symbols: int = 65536
    training_len: int = 500
    mu: float = 0.2
    rng: RngStream = field(default_factory=lambda: RngStream(0))
    anchor_window: int = 32
    anchor_smooth: int = 9

    def __post_init__(self):
        if self.compensation not in COMPENSATIONS:
            raise ValueError(f"compensation must be one of {COMPENSATIONS}")
        if self.n_symbols < 2:
            raise ValueError("n_symbols must be >= 2")
        if self.training_len < 1:
            raise ValueError("training_len must be >= 1")
        if self.anchor_window < 0:
            raise ValueError("anchor_window must be >= 0 (0 disables anchoring)")
        if self.anchor_smooth < 1 or self.anchor_smooth % 2 == 0:
            raise ValueError("anchor_smooth must be an odd count >= 1")

    @property
    def name(self) -> str:
        return (
            f"{self.compensation}_{self.fiber.length_km:g}km"
            f"_tx{self.tx_laser.linewidth_3db / 1e6:g}MHz"
            f"_lo{self.lo_laser.linewidth_3db / 1e6:g}MHz"
        )


@dataclass(frozen=True)
class BerRecord:
    """One measured point plus its analytic companions."""

    scenario: str
    compensation: str
    distance_km: float
    df_tx_hz: float
    df_lo_hz: float
    osnr_db: float
    n_bits: int
    n_errors: int
    ber: float
    eepn_lw_hz: float
    eff_lw_hz: float
    ber_floor_theory: float

    def __post_init__(self):
        if self.n_bits > 0 and not math.isclose(
            self.ber, self.n_errors / self.n_bits, rel_tol=1e-12, abs_tol=1e-300
        ):
            raise ValueError("ber must equal n_errors / n_bits")


def eepn_source_linewidth(sc: LinkScenario) -> float:
    """Linewidth of the laser whose phase noise meets net dispersion."""
    if sc.compensation == "post":
        return sc.lo_laser.linewidth_3db
    if sc.compensation == "pre":
        return sc.tx_laser.linewidth_3db
    return 0.0


def analytic_companions(sc: LinkScenario) -> tuple[float, float, float]:
    """(eepn_lw, eff_lw, ber_floor) for the scenario's configuration."""
    if sc.compensation == "optical":
        eepn_lw = 0.0
    else:
        eepn_lw = eepn_linewidth(sc.fiber, eepn_source_linewidth(sc), sc.clock)
    eff_lw = effective_linewidth(sc.tx_laser, sc.lo_laser, eepn_lw)
    return eepn_lw, eff_lw, ber_floor(eff_lw, sc.clock)


def edge_guard_symbols(sc: LinkScenario) -> int:
    """Symbols lost to FIR edge transients at each end of a post block."""
    if sc.compensation != "post" or sc.fiber.total_dispersion == 0.0:
        return 0
    eq = design_fir_equalizer(sc.fiber, sc.clock.sample_period)
    return eq.edge_symbols


def _run(sc: LinkScenario) -> BerRecord:
    guard = edge_guard_symbols(sc)
    if sc.n_symbols <= sc.training_len + 2 * guard:
        raise ValueError(
            f"n_symbols={sc.n_symbols} must exceed training_len + 2*guard "
            f"= {sc.training_len + 2 * guard}"
        )
    constellation = Constellation.for_order(sc.constellation_order)
    k = constellation.bits_per_symbol
    dispersive = sc.compensation != "optical" and sc.fiber.total_dispersion != 0.0

    prbs_seed = (sc.rng.substream(_TAG_PRBS).stream_id % 65535) + 1
    bits = prbs16(sc.n_symbols * k, prbs_seed)
    symbols = map_symbols(bits, constellation)
    wave = shape_waveform(symbols, sc.clock)

    tx_phase = gen_wiener_phase(
        len(wave), sc.tx_laser, wave.sample_period, sc.rng.substream(_TAG_TX_PHASE)
    )
    lo_phase = gen_wiener_phase(
        len(wave), sc.lo_laser, wave.sample_period, sc.rng.substream(_TAG_LO_PHASE)
    )

    if sc.compensation == "pre" and dispersive:
        wave = apply_cd_frequency_domain(wave, CdOperator(sc.fiber, "inverse"))
    wave = apply_phase(wave, tx_phase, +1)
    if dispersive:
        wave = apply_cd_frequency_domain(wave, CdOperator(sc.fiber, "fiber"))
    wave = load_noise_for_osnr(
        wave,
        sc.osnr_db,
        sc.clock.symbol_rate,
        sc.clock.samples_per_symbol,
        sc.rng.substream(_TAG_ASE),
    )
    wave = mix_with_lo(wave, lo_phase)
    if sc.compensation == "post" and dispersive:
        eq = design_fir_equalizer(sc.fiber, wave.sample_period)
        wave = apply_fir(wave, eq)

    rx = downsample_to_symbols(wave, sc.clock, offset=0)
    state = LmsState(step_mu=sc.mu, training_len=sc.training_len)
    corrected, _ = cpe_lms(rx, symbols[: sc.training_len], state, constellation)
    corrected = anchor_phase_ambiguity(
        corrected, symbols, window=sc.anchor_window, smooth=sc.anchor_smooth
    )
    skip = max(sc.training_len, guard)
    n_errors, n_bits = decide_and_count(corrected, bits, constellation, skip, skip_end=guard)

    eepn_lw, eff_lw, floor = analytic_companions(sc)
    return BerRecord(
        scenario=sc.name,
        compensation=sc.compensation,
        distance_km=sc.fiber.length_km,
        df_tx_hz=sc.tx_laser.linewidth_3db,
        df_lo_hz=sc.lo_laser.linewidth_3db,
        osnr_db=sc.osnr_db,
        n_bits=n_bits,
        n_errors=n_errors,
        ber=n_errors / n_bits,
        eepn_lw_hz=eepn_lw,
        eff_lw_hz=eff_lw,
        ber_floor_theory=floor,
    )


def simulate_post(sc: LinkScenario) -> BerRecord:
    """Receiver-side electronic CD compensation (EEPN from the LO laser)."""
    if sc.compensation != "post":
        raise ValueError("scenario compensation must be 'post'")
    return _run(sc)


def simulate_pre(sc: LinkScenario) -> BerRecord:
    """Transmitter-side electrical pre-distortion (EEPN from the Tx laser).

    The carrier phase noise is imprinted after the pre-distortion, so
    the pre-equalizer's dispersion never meets the Tx laser; the
    transmission fiber does.
    """
    if sc.compensation != "pre":
        raise ValueError("scenario compensation must be 'pre'")
    return _run(sc)


def simulate_optical_comp(sc: LinkScenario) -> BerRecord:
    """In-line optical dispersion compensation: zero net dispersion.

    Bit-for-bit identical to a back-to-back run with the same streams;
    only the intrinsic linewidth sum drives the floor.
    """
    if sc.compensation != "optical":
        raise ValueError("scenario compensation must be 'optical'")
    return _run(sc)


_DISPATCH = {
    "post": simulate_post,
    "pre": simulate_pre,
    "optical": simulate_optical_comp,
}


def simulate(sc: LinkScenario) -> BerRecord:
    """Run the pipeline matching ``sc.compensation``."""
    return _DISPATCH[sc.compensation](sc)
