"""Invariant suite behind ``eepnlab selftest``.

Each check prints one PASS/FAIL line; the suite returns True only if
every check passes. Kept fast enough to run routinely (well under two
minutes on a laptop core).
"""

import math

import numpy as np

from .analytics import FiberSpec, LaserSpec, SymbolClock
from .dispersion import CdOperator, apply_cd_frequency_domain, design_fir_equalizer
from .harness import config_from_dict, run_sweep
from .modem import ComplexSignal, Constellation, prbs16
from .noise import RngStream, gen_wiener_phase
from .rxdsp import LmsState, cpe_lms

REFERENCE_FIBER = FiberSpec.from_engineering(16.0, 2000.0, 1550.0)
REFERENCE_CLOCK = SymbolClock.from_rate(28e9, 2)


def check_dispersion_identities() -> bool:
    rng = np.random.default_rng(20)
    x = rng.normal(size=4096) + 1j * rng.normal(size=4096)
    sig = ComplexSignal(x, REFERENCE_CLOCK.sample_period)
    fwd = apply_cd_frequency_domain(sig, CdOperator(REFERENCE_FIBER, "fiber"))
    energy_ok = math.isclose(
        float(np.sum(np.abs(fwd.samples) ** 2)),
        float(np.sum(np.abs(x) ** 2)),
        rel_tol=1e-12,
    )
    back = apply_cd_frequency_domain(fwd, CdOperator(REFERENCE_FIBER, "inverse"))
    err = np.max(np.abs(back.samples - x)) / np.max(np.abs(x))
    return energy_ok and err < 1e-10


def check_fir_tap_count() -> bool:
    eq = design_fir_equalizer(REFERENCE_FIBER, REFERENCE_CLOCK.sample_period)
    return eq.n_taps == 805


def check_wiener_statistics() -> bool:
    n = 200_000
    lw = 5e6
    dt = REFERENCE_CLOCK.sample_period
    traj = gen_wiener_phase(n, LaserSpec(lw), dt, RngStream(11, 7))
    ok = True
    for lag in (1, 4, 16):
        inc = traj.phases[lag:] - traj.phases[:-lag]
        inc = inc[::lag]  # non-overlapping increments
        target = 2.0 * math.pi * lw * dt * lag
        rel_3se = 3.0 * math.sqrt(2.0 / inc.size)
        ok &= abs(float(np.var(inc)) / target - 1.0) < rel_3se
    # excess kurtosis of unit increments ~ 0
    inc1 = np.diff(traj.phases)
    z = (inc1 - inc1.mean()) / inc1.std()
    kurt = float(np.mean(z**4)) - 3.0
    ok &= abs(kurt) < 3.0 * math.sqrt(24.0 / inc1.size)
    return ok


def check_prbs_period() -> bool:
    for seed in (0xFFFF, 0xACE1, 1):
        two = prbs16(2 * 65535, seed)
        if not np.array_equal(two[:65535], two[65535:]):
            return False
        if int(two[:65535].sum()) != 32768:
            return False
    return True


def _tiny_sweep_config(parallelism: int) -> dict:
    return {
        "base": {
            "compensation": "post",
            "symbol_rate_hz": 28e9,
            "samples_per_symbol": 2,
            "dispersion_ps_nm_km": 16.0,
            "distance_km": 100.0,
            "n_symbols": 4096,
            "training_len": 400,
        },
        "osnr_grid": {"start_db": 9.0, "stop_db": 11.0, "step_db": 2.0, "include_no_noise": False},
        "scenarios": [{"name": "tx1_lo1", "df_tx_hz": 1e6, "df_lo_hz": 1e6}],
        "min_errors": 50,
        "max_symbols": 40_000,
        "parallelism": parallelism,
        "master_seed": 77,
    }


def check_parallel_determinism() -> bool:
    serial = run_sweep(config_from_dict(_tiny_sweep_config(1)))
    parallel = run_sweep(config_from_dict(_tiny_sweep_config(2)))
    return serial.records == parallel.records


def check_lms_noiseless_tracking() -> bool:
    # pure Wiener phase with per-symbol variance <= 1e-4, no additive noise
    n = 100_000
    clock = SymbolClock.from_rate(28e9, 1)
    lw = 1e-4 / (2.0 * math.pi * clock.symbol_period_Ts)
    constellation = Constellation.qpsk()
    rng = np.random.default_rng(4)
    labels = rng.integers(0, 4, n)
    symbols = constellation.points[labels]
    phases = gen_wiener_phase(n, LaserSpec(lw), clock.symbol_period_Ts, RngStream(5, 1))
    rx = symbols * np.exp(1j * phases.phases)
    for mu in (0.05, 0.2, 0.5):
        y, _ = cpe_lms(rx, symbols[:500], LmsState(step_mu=mu, training_len=500), constellation)
        decided = np.abs(y[:, None] - constellation.points[None, :]).argmin(axis=1)
        if np.any(decided[500:] != labels[500:]):
            return False
    return True


CHECKS = [
    ("dispersion all-pass / inverse identities", check_dispersion_identities),
    ("FIR tap count for 16 ps/nm/km, 2000 km, 28 GS/s", check_fir_tap_count),
    ("Wiener phase increment statistics", check_wiener_statistics),
    ("PRBS16 period and balance", check_prbs_period),
    ("sweep determinism under parallelism", check_parallel_determinism),
    ("LMS noiseless tracking, zero errors", check_lms_noiseless_tracking),
]


def run_selftest(out=print) -> bool:
    all_ok = True
    for name, fn in CHECKS:
        ok = bool(fn())
        all_ok &= ok
        out(f"[{'PASS' if ok else 'FAIL'}] {name}")
    out("selftest: " + ("all checks passed" if all_ok else "FAILURES detected"))
    return all_ok
