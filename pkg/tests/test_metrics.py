"""Figures of merit: interference bookkeeping, overhead law, rate, CDFs."""

import math

import numpy as np
import pytest
from scipy import stats

from ddchan.channel import DDChannel, DDPath, generate_wssus
from ddchan.grid import TFGrid
from ddchan.metrics import (
    achievable_rate,
    cdf,
    isci_power,
    nmse_db,
    training_overhead,
)
from ddchan.modem import default_taps


@pytest.fixture
def grid():
    return TFGrid.from_subcarrier_spacing(200e3, 16, 16)


class TestIsciPower:
    def test_zero_spread_channel_has_no_interference(self, grid):
        ch = DDChannel((DDPath(0.0, 0.0, 1.0),), 0.0, 0.0)
        rep = isci_power(ch, grid, default_taps(grid))
        assert rep.isi_power == 0.0
        assert rep.ici_power == 0.0
        assert rep.isci_power == 0.0

    def test_partition_bookkeeping(self, grid):
        ch = generate_wssus(1e-6, 10e3, 6, seed=2)
        rep = isci_power(ch, grid, default_taps(grid))
        isi = sum(p for (dn, _), p in rep.per_tap.items() if dn != 0)
        ici = sum(p for (dn, dm), p in rep.per_tap.items() if dn == 0 and dm != 0)
        assert rep.isi_power == pytest.approx(isi)
        assert rep.ici_power == pytest.approx(ici)
        assert rep.isci_power == pytest.approx(isi + ici)
        assert all(p >= 0 for p in rep.per_tap.values())

    def test_ensemble_matches_channel_average(self, grid):
        """Quadrature expectation vs an average of per-channel exact ratios."""
        tau_d, nu_d = 1e-6, 10e3
        taps = default_taps(grid, 1, 3)
        ens = isci_power((tau_d, nu_d), grid, taps, edge_correction=True)
        ratios = []
        for seed in range(400):
            ch = generate_wssus(tau_d, nu_d, 4, seed=seed)
            ratios.append(isci_power(ch, grid, taps).isci_power)
        assert np.mean(ratios) == pytest.approx(ens.isci_power, rel=0.02)

    def test_ensemble_monotone_in_spreads(self, grid):
        taps = default_taps(grid, 2, 2)
        base = isci_power((0.5e-6, 8e3), grid, taps).isci_power
        more_delay = isci_power((0.9e-6, 8e3), grid, taps).isci_power
        more_doppler = isci_power((0.5e-6, 14e3), grid, taps).isci_power
        assert more_delay > base
        assert more_doppler > base


class TestNmse:
    def test_perfect_estimate_hits_floor(self):
        h = np.ones((4, 4), complex)
        assert nmse_db(h, h) == -300.0

    def test_zero_estimate_is_zero_db(self):
        h = np.full((4, 4), 2.0, complex)
        assert nmse_db(np.zeros_like(h), h) == pytest.approx(0.0)

    def test_minus_twenty_db(self):
        rng = np.random.default_rng(0)
        h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        e = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        e *= math.sqrt(0.01) * np.linalg.norm(h) / np.linalg.norm(e)
        assert nmse_db(h + e, h) == pytest.approx(-20.0, abs=1e-9)

    def test_zero_reference_rejected(self):
        with pytest.raises(ValueError):
            nmse_db(np.ones((2, 2)), np.zeros((2, 2)))


class TestTrainingOverhead:
    def test_four_percent_asymptote(self):
        # spread product 0.04 and B*S -> 1e6: ratio -> 0.04
        grid = TFGrid.from_symbol_duration(1e-3, 1000, 1000)
        ch = DDChannel((), 0.2, 0.2)  # tau_D*B = nu_D*S = 200
        out = training_overhead(grid, ch)
        assert 0.04 < out.ratio < 0.0404
        assert out.ratio == pytest.approx(0.04 + 4e-6)

    def test_zero_spread_minimum_is_four_slots(self):
        grid = TFGrid.from_symbol_duration(1e-3, 10, 10)
        ch = DDChannel((), 0.0, 0.0)
        assert training_overhead(grid, ch).min_slots == 4

    def test_exact_vs_asymptotic_arithmetic(self):
        # tau_D*B = 10 and nu_D*S = 8: ceiling product 12*10, asymptote 84
        grid = TFGrid.from_symbol_duration(1e-3, 100, 100)
        ch = DDChannel((), 10.0 / grid.B, 8.0 / grid.S)
        out = training_overhead(grid, ch)
        assert out.min_slots == 12 * 10
        bs = grid.B * grid.S
        assert out.ratio == pytest.approx(84.0 / bs)
        assert out.exact_ratio == pytest.approx(120.0 / bs)

    def test_gap_to_asymptote_shrinks(self):
        ratios = []
        for side in (32, 100, 316, 1000):
            grid = TFGrid.from_symbol_duration(1e-3, side, side)
            ch = DDChannel((), 0.2, 0.2)
            out = training_overhead(grid, ch)
            ratios.append(out.ratio - 0.04)
        assert ratios[0] > ratios[1] > ratios[2] > ratios[3] > 0


class TestAchievableRate:
    def test_unit_snr_unit_rate(self):
        rep = achievable_rate(1.0, 0.0, 1.0, 0.0, 0.0)
        assert rep.rate == pytest.approx(1.0)

    def test_half_overhead(self):
        rep = achievable_rate(3.0, 0.0, 1.0, 0.0, 0.5)
        assert rep.sinr == pytest.approx(3.0)
        assert rep.rate == pytest.approx(1.0)

    def test_monotone_in_overhead_and_interference(self):
        base = achievable_rate(1.0, 0.1, 0.1, 0.05, 0.1).rate
        assert achievable_rate(1.0, 0.1, 0.1, 0.05, 0.3).rate < base
        assert achievable_rate(1.0, 0.3, 0.1, 0.05, 0.1).rate < base
        assert achievable_rate(1.0, 0.1, 0.1, 0.25, 0.1).rate < base

    def test_validation(self):
        with pytest.raises(ValueError):
            achievable_rate(-1.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            achievable_rate(1.0, 0.0, 0.0, 0.0, 1.0)


class TestCdf:
    def test_constant_samples_step(self):
        series = cdf([2.5, 2.5, 2.5])
        assert np.all(series.values == 2.5)
        assert np.all(series.ordinates == 1.0)

    def test_two_samples(self):
        series = cdf([2.0, 1.0])
        assert series.values.tolist() == [1.0, 2.0]
        assert series.ordinates.tolist() == [0.5, 1.0]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            cdf([])

    def test_uniform_ks_distance(self):
        rng = np.random.default_rng(1)
        series = cdf(rng.uniform(0, 1, 10_000))
        ks = np.max(np.abs(series.ordinates - series.values))
        assert ks < 0.02
        assert stats.kstest(series.values, "uniform").pvalue > 0.01

    def test_ordinates_nondecreasing(self):
        rng = np.random.default_rng(2)
        series = cdf(rng.standard_normal(503))
        assert np.all(np.diff(series.ordinates) >= 0)
        assert series.ordinates[-1] == 1.0
