"""Closed-form model against independently computed oracle values.

The frozen constants below were evaluated with 40-digit mpmath
arithmetic straight from the formulas, independent of the package.
"""

import math

import numpy as np
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

FIBER = FiberSpec.from_engineering(16.0, 2000.0, 1550.0)
CLOCK = SymbolClock.from_rate(28e9, 2)

# mpmath (dps=40) evaluations of the corresponding expressions
VAR_5MHZ = 0.05639499785067584
LW_5MHZ = 251315194.86057245
LW_10MHZ = 502630389.72114489
FLOOR_422MHZ = 0.0053515273720601393
FLOOR_EFF_0_10 = 0.010288129423097768
FLOOR_EFF_5_5 = 0.00059062141121094139


def rel(a, b):
    return abs(a - b) / abs(b)


class TestFiberSpec:
    def test_engineering_unit_round_trip_is_exact(self):
        assert FIBER.d_ps_nm_km == 16.0
        assert FIBER.length_km == 2000.0

    def test_rejects_negative_length(self):
        with pytest.raises(ValueError):
            FiberSpec(dispersion_D=1e-5, length_L=-1.0)

    def test_light_speed_is_pinned(self):
        with pytest.raises(ValueError):
            FiberSpec(dispersion_D=1e-5, length_L=1.0, light_speed_c=3e8)


class TestEepnVariance:
    def test_reference_point(self):
        assert rel(eepn_variance(FIBER, 5e6, CLOCK), VAR_5MHZ) < 1e-9

    def test_zero_linewidth_and_zero_length(self):
        assert eepn_variance(FIBER, 0.0, CLOCK) == 0.0
        short = FiberSpec.from_engineering(16.0, 0.0, 1550.0)
        assert eepn_variance(short, 5e6, CLOCK) == 0.0

    def test_linear_in_every_factor(self):
        rng = np.random.default_rng(1)
        base = eepn_variance(FIBER, 5e6, CLOCK)
        for _ in range(50):
            a = float(rng.uniform(0.1, 10.0))
            scaled_d = FiberSpec(FIBER.dispersion_D * a, FIBER.length_L, FIBER.wavelength_lambda)
            scaled_l = FiberSpec(FIBER.dispersion_D, FIBER.length_L * a, FIBER.wavelength_lambda)
            fast = SymbolClock(CLOCK.symbol_period_Ts / a, CLOCK.samples_per_symbol)
            assert rel(eepn_variance(scaled_d, 5e6, CLOCK), a * base) < 1e-12
            assert rel(eepn_variance(scaled_l, 5e6, CLOCK), a * base) < 1e-12
            assert rel(eepn_variance(FIBER, 5e6 * a, CLOCK), a * base) < 1e-12
            assert rel(eepn_variance(FIBER, 5e6, fast), a * base) < 1e-12

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            eepn_variance(FIBER, -1.0, CLOCK)
        with pytest.raises(ValueError):
            eepn_variance(FIBER, math.nan, CLOCK)


class TestEepnLinewidth:
    def test_reference_points(self):
        assert rel(eepn_linewidth(FIBER, 5e6, CLOCK), LW_5MHZ) < 1e-9
        assert rel(eepn_linewidth(FIBER, 10e6, CLOCK), LW_10MHZ) < 1e-9

    def test_zero(self):
        assert eepn_linewidth(FIBER, 0.0, CLOCK) == 0.0

    def test_identity_with_variance(self):
        lw = eepn_linewidth(FIBER, 5e6, CLOCK)
        assert math.isclose(
            lw * 2.0 * math.pi * CLOCK.symbol_period_Ts,
            eepn_variance(FIBER, 5e6, CLOCK),
            rel_tol=1e-14,
        )


class TestEffectiveLinewidth:
    def test_sum_and_symmetry(self):
        assert effective_linewidth(LaserSpec(10e6), LaserSpec(0.0), 0.0) == 10e6
        assert effective_linewidth(LaserSpec(0.0), LaserSpec(0.0), 0.0) == 0.0
        a = effective_linewidth(LaserSpec(5e6), LaserSpec(5e6), 251.3e6)
        b = effective_linewidth(LaserSpec(5e6), LaserSpec(5e6), 251.3e6)
        assert a == b == 261.3e6
        assert effective_linewidth(LaserSpec(3e6), LaserSpec(7e6), 1e6) == effective_linewidth(
            LaserSpec(7e6), LaserSpec(3e6), 1e6
        )

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            effective_linewidth(LaserSpec(1e6), LaserSpec(1e6), -1.0)


class TestBerFloor:
    def test_reference_points(self):
        assert rel(ber_floor(422e6, CLOCK), FLOOR_422MHZ) < 1e-9
        assert rel(ber_floor(10e6 + LW_10MHZ, CLOCK), FLOOR_EFF_0_10) < 1e-9
        assert rel(ber_floor(10e6 + LW_5MHZ, CLOCK), FLOOR_EFF_5_5) < 1e-9

    def test_tails(self):
        assert ber_floor(10e6, CLOCK) < 1e-30
        assert ber_floor(0.0, CLOCK) == 0.0

    def test_monotone_with_limit_half(self):
        grid = np.logspace(6, 16, 60)
        values = [ber_floor(float(f), CLOCK) for f in grid]
        assert all(b2 >= b1 for b1, b2 in zip(values, values[1:]))
        assert values[-1] < 0.5
        assert values[-1] > 0.49

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ber_floor(-1.0, CLOCK)


class TestOsnrConversion:
    def test_reference_points(self):
        assert rel(osnr_to_es_n0(10.0, 28e9), 8.928571428571429) < 1e-12
        assert osnr_to_es_n0(0.0, 25e9) == 1.0
        assert rel(osnr_to_es_n0(3.01, 25e9), 1.9998618696327441) < 1e-12

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            osnr_to_es_n0(10.0, 0.0)
        with pytest.raises(ValueError):
            osnr_to_es_n0(10.0, 28e9, ref_bandwidth=-1.0)


class TestQpskBerAwgn:
    def test_reference_points(self):
        assert rel(qpsk_ber_awgn(8.928571428571429), 0.0014037192310010068) < 1e-9
        # erfc(0) = 1, so the zero-SNR limit is one half
        assert qpsk_ber_awgn(0.0) == 0.5
        assert qpsk_ber_awgn(1e4) < 1e-20

    def test_strictly_decreasing(self):
        grid = np.linspace(0.0, 30.0, 200)
        values = [qpsk_ber_awgn(float(x)) for x in grid]
        assert all(b2 < b1 for b1, b2 in zip(values, values[1:]))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            qpsk_ber_awgn(-0.1)


def test_erfc_matches_high_precision_oracle():
    mpmath = pytest.importorskip("mpmath")
    from scipy.special import erfc

    mpmath.mp.dps = 30
    for x in np.linspace(0.0, 10.0, 401):
        expected = float(mpmath.erfc(mpmath.mpf(float(x))))
        assert abs(float(erfc(x)) - expected) <= 1e-10 * expected
