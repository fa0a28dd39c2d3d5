"""Acceptance suite: one test per criterion, one PASS line per criterion.

Criteria 4 and 5 run the full fig4/fig5 sweep presets and take a few
minutes on one core; everything else is fast. Run with ``-s`` to watch
the per-criterion lines stream.
"""

import math

import pytest

from eepnlab.analytics import (
    FiberSpec,
    LaserSpec,
    SymbolClock,
    ber_floor,
    eepn_linewidth,
    eepn_variance,
    effective_linewidth,
    osnr_to_es_n0,
    qpsk_ber_awgn,
)
from eepnlab.harness import config_from_preset, run_sweep
from eepnlab.link import LinkScenario, simulate
from eepnlab.noise import RngStream

FIBER = FiberSpec.from_engineering(16.0, 2000.0, 1550.0)
B2B_FIBER = FiberSpec.from_engineering(16.0, 0.0, 1550.0)
CLOCK = SymbolClock.from_rate(28e9, 2)
CAL_MU = 0.002  # gentle CPE for the AWGN calibration criteria


def _report(criterion, ok, detail):
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


def accumulate(compensation, fiber, df_tx, df_lo, osnr_db, n_trials, seed, mu=0.2):
    errs = bits = 0
    for t in range(n_trials):
        sc = LinkScenario(
            compensation,
            LaserSpec(df_tx),
            LaserSpec(df_lo),
            fiber,
            CLOCK,
            osnr_db=osnr_db,
            n_symbols=65536,
            mu=mu,
            rng=RngStream(seed, t),
        )
        rec = simulate(sc)
        errs += rec.n_errors
        bits += rec.n_bits
    return errs, bits


@pytest.fixture(scope="module")
def fig4_results():
    return run_sweep(config_from_preset("fig4"))


@pytest.fixture(scope="module")
def fig5_results():
    return run_sweep(config_from_preset("fig5"))


def floors(results):
    return {r.scenario: r for r in results.records if math.isinf(r.osnr_db)}


def test_criterion_1_analytic_oracles():
    checks = [
        (eepn_variance(FIBER, 5e6, CLOCK), 0.05639499785067584),
        (eepn_linewidth(FIBER, 5e6, CLOCK), 251315194.86057245),
        (eepn_linewidth(FIBER, 10e6, CLOCK), 502630389.72114489),
        (
            effective_linewidth(LaserSpec(5e6), LaserSpec(5e6), 251315194.86057245),
            261315194.86057245,
        ),
        (ber_floor(422e6, CLOCK), 0.0053515273720601393),
        (osnr_to_es_n0(10.0, 28e9), 8.928571428571429),
        (qpsk_ber_awgn(8.928571428571429), 0.0014037192310010068),
    ]
    worst = max(abs(got - want) / abs(want) for got, want in checks)
    _report(1, worst < 1e-9, f"max relative error {worst:.2e} over {len(checks)} oracle values")


def test_criterion_2_back_to_back_awgn():
    expected = qpsk_ber_awgn(osnr_to_es_n0(10.0, 28e9))
    errs, bits = accumulate("post", B2B_FIBER, 0.0, 0.0, 10.0, n_trials=8, seed=201, mu=CAL_MU)
    ber = errs / bits
    se = math.sqrt(expected * (1 - expected) / bits)
    dev = (ber - expected) / se
    _report(
        2,
        bits >= 1_000_000 and abs(dev) < 3.0,
        f"b2b OSNR 10 dB: ber={ber:.4e} vs {expected:.4e} ({dev:+.2f} binomial SE, {bits} bits)",
    )


def test_criterion_3_perfect_equalization():
    zero_ok = True
    for comp in ("post", "pre"):
        errs, _ = accumulate(comp, FIBER, 0.0, 0.0, math.inf, n_trials=1, seed=301, mu=CAL_MU)
        zero_ok &= errs == 0
    lo_band = qpsk_ber_awgn(osnr_to_es_n0(10.5, 28e9))
    hi_band = qpsk_ber_awgn(osnr_to_es_n0(9.5, 28e9))
    detail = []
    band_ok = True
    for comp in ("post", "pre"):
        errs, bits = accumulate(comp, FIBER, 0.0, 0.0, 10.0, n_trials=4, seed=302, mu=CAL_MU)
        ber = errs / bits
        se = 3.0 * math.sqrt(ber * (1 - ber) / bits) if errs else 0.0
        band_ok &= (lo_band - se) <= ber <= (hi_band + se)
        detail.append(f"{comp}: {ber:.3e}")
    _report(
        3,
        zero_ok and band_ok,
        f"2000 km zero-linewidth noiseless BER=0: {zero_ok}; OSNR 10 dB within "
        f"0.5 dB band [{lo_band:.3e}, {hi_band:.3e}]: {', '.join(detail)}",
    )


def test_criterion_4_fig4_post_compensation(fig4_results):
    f = floors(fig4_results)
    tx_only, split, lo_only = f["tx10_lo0"], f["tx5_lo5"], f["tx0_lo10"]
    ok_budget = all(
        r.n_errors >= 100 or r.n_bits >= 2_000_000 * (1 - 0.05)
        for r in fig4_results.records
    )
    ok_txfloor = tx_only.ber < 1e-3
    ratio_lo = lo_only.ber / lo_only.ber_floor_theory
    ok_lofloor = 1.0 / 3.0 < ratio_lo < 3.0
    ratio_split = split.ber / split.ber_floor_theory
    ok_split = (tx_only.ber < split.ber < lo_only.ber) and (1.0 / 3.0 < ratio_split < 3.0)
    ok_order = lo_only.ber > split.ber > tx_only.ber
    ok_asym = lo_only.ber > 10.0 * tx_only.ber
    _report(
        4,
        ok_budget and ok_txfloor and ok_lofloor and ok_split and ok_order and ok_asym,
        f"floors (10,0)={tx_only.ber:.2e} (5,5)={split.ber:.2e} (0,10)={lo_only.ber:.2e}; "
        f"ratio-to-theory (0,10)={ratio_lo:.2f} (5,5)={ratio_split:.2f}",
    )


def test_criterion_5_fig5_pre_compensation(fig4_results, fig5_results):
    f5 = floors(fig5_results)
    f4 = floors(fig4_results)
    lo_only5, split5, tx_only5 = f5["tx0_lo10"], f5["tx5_lo5"], f5["tx10_lo0"]
    ok_lofloor = lo_only5.ber < 1e-3
    ratio_tx = tx_only5.ber / tx_only5.ber_floor_theory
    ok_txfloor = 1.0 / 3.0 < ratio_tx < 3.0

    # mirror symmetry: floor(pre; a, b) vs floor(post; b, a), factor <= 2
    # plus Monte Carlo error; pairs without measurable errors on both
    # sides are consistent "no observable floor" and compare as < 1e-3
    def mirror_ok(pre_rec, post_rec):
        if pre_rec.n_errors >= 30 and post_rec.n_errors >= 30:
            mc = 1.0 + 3.0 * (pre_rec.n_errors**-0.5 + post_rec.n_errors**-0.5)
            ratio = pre_rec.ber / post_rec.ber
            return ratio <= 2.0 * mc and ratio >= 0.5 / mc
        return pre_rec.ber < 1e-3 and post_rec.ber < 1e-3

    pairs = [
        (tx_only5, f4["tx0_lo10"]),
        (split5, f4["tx5_lo5"]),
        (lo_only5, f4["tx10_lo0"]),
    ]
    ok_mirror = all(mirror_ok(a, b) for a, b in pairs)
    mirror_detail = ", ".join(
        f"{a.scenario}:{a.ber:.2e}~{b.ber:.2e}" for a, b in pairs
    )
    ok_asym = tx_only5.ber > 10.0 * lo_only5.ber
    _report(
        5,
        ok_lofloor and ok_txfloor and ok_mirror and ok_asym,
        f"pre floors (0,10)={lo_only5.ber:.2e} (10,0)={tx_only5.ber:.2e} "
        f"(ratio-to-theory {ratio_tx:.2f}); mirror pairs {mirror_detail}",
    )


def test_criterion_6_dcf_eliminates_eepn():
    errs = bits = 0
    t = 0
    while bits < 10_000_000:
        sc = LinkScenario(
            "optical",
            LaserSpec(5e6),
            LaserSpec(5e6),
            FIBER,
            CLOCK,
            osnr_db=math.inf,
            n_symbols=65536,
            rng=RngStream(601, t),
        )
        rec = simulate(sc)
        errs += rec.n_errors
        bits += rec.n_bits
        t += 1
    ber = errs / bits
    _report(6, ber <= 1e-6, f"optical compensation (5,5) MHz: {errs} errors in {bits} bits (ber={ber:.2e})")


def test_criterion_7_selftest_suite(capsys):
    from eepnlab.selftest import run_selftest

    ok = run_selftest()
    captured = capsys.readouterr().out
    n_pass = captured.count("[PASS]")
    _report(7, ok and n_pass == 6, f"eepnlab selftest: {n_pass}/6 checks passed")
