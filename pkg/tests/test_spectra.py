"""Integration, rate and waterfilling numerics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirelay.link import FrequencyGrid, Spectrum
from mirelay.spectra import (PowerAllocation, allocate_concave, integrate,
                             mrc_snr, shannon_rate, trapezoid_weights,
                             waterfill, waterfill_bins)


def grid(count=9, start=1e3, step=100.0):
    return FrequencyGrid(start=start, step=step, count=count)


class TestIntegration:
    def test_trapezoid_weights_sum_to_width(self):
        g = grid(count=17)
        assert np.sum(trapezoid_weights(g)) == pytest.approx(g.width)

    def test_integral_exact_for_linear(self):
        g = grid()
        f = g.frequencies
        s = Spectrum(g, 3.0 * f + 7.0)
        exact = 3.0 * (f[0] + f[-1]) / 2 * g.width + 7.0 * g.width
        assert integrate(s) == pytest.approx(exact, rel=1e-12)

    def test_weights_match_trapezoid(self):
        g = grid(count=33)
        vals = np.sin(np.linspace(0, 3, g.count)) + 1.5
        assert np.sum(trapezoid_weights(g) * vals) == pytest.approx(
            np.trapezoid(vals, dx=g.step), rel=1e-12)


class TestShannonRate:
    def test_flat_channel(self):
        g = grid()
        snr = Spectrum(g, np.full(g.count, 3.0))
        assert shannon_rate(snr, 1.0) == pytest.approx(g.width * 2.0)
        assert shannon_rate(snr, 0.5) == pytest.approx(g.width)

    def test_zero_snr_zero_rate(self):
        g = grid()
        assert shannon_rate(Spectrum(g, np.zeros(g.count))) == 0.0

    def test_mrc_adds_pointwise(self):
        g = grid()
        a = Spectrum(g, np.arange(g.count, dtype=float))
        b = Spectrum(g, np.full(g.count, 2.0))
        np.testing.assert_array_equal(mrc_snr(a, b).values,
                                      a.values + 2.0)


class TestWaterfillBins:
    def test_two_bin_example(self):
        p = waterfill_bins(np.array([1.0, 4.0]), np.ones(2), 1.0)
        np.testing.assert_allclose(p, [0.125, 0.875], rtol=1e-9)

    def test_single_bin_gets_everything(self):
        p = waterfill_bins(np.array([0.0, 2.0, 0.0]), np.ones(3), 5.0)
        np.testing.assert_allclose(p, [0.0, 5.0, 0.0])

    def test_equal_bins_split_equally(self):
        p = waterfill_bins(np.full(4, 3.0), np.ones(4), 2.0)
        np.testing.assert_allclose(p, np.full(4, 0.5), rtol=1e-9)

    def test_tiny_budget_goes_to_best_bin(self):
        # regression: far-apart 1/k values used to starve the bisection
        k = np.array([1e-30, 2e-30, 1e-29])
        p = waterfill_bins(k, np.ones(3), 1e-3)
        assert p[2] == pytest.approx(1e-3)
        assert p[0] == p[1] == 0.0

    def test_kkt_residuals(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            k = 10 ** rng.uniform(-3, 3, size=8)
            w = rng.uniform(0.5, 2.0, size=8)
            budget = 10 ** rng.uniform(-2, 2)
            p = waterfill_bins(k, w, budget)
            assert np.sum(w * p) == pytest.approx(budget, rel=1e-9)
            # active bins share one water level; inactive bins sit above it
            level = p + 1.0 / k
            active = p > 0
            lv = level[active]
            assert np.max(lv) - np.min(lv) <= 1e-8 * np.max(lv)
            if np.any(~active):
                assert np.min(1.0 / k[~active]) >= np.max(lv) * (1 - 1e-8)

    def test_dominates_random_allocations(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            k = 10 ** rng.uniform(-2, 2, size=8)
            w = np.ones(8)
            budget = 10 ** rng.uniform(-1, 1)
            p = waterfill_bins(k, w, budget)
            best = np.sum(w * np.log2(1 + p * k))
            raw = rng.uniform(0, 1, size=(10_000, 8))
            raw *= budget / np.sum(raw * w, axis=1, keepdims=True)
            rates = np.sum(w * np.log2(1 + raw * k), axis=1)
            assert np.max(rates) <= best * (1 + 1e-12)

    @given(st.integers(2, 16), st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_budget_always_conserved(self, bins, seed):
        rng = np.random.default_rng(seed)
        k = 10 ** rng.uniform(-6, 6, size=bins)
        w = rng.uniform(0.1, 10.0, size=bins)
        budget = 10 ** rng.uniform(-3, 3)
        p = waterfill_bins(k, w, budget)
        assert np.all(p >= 0)
        assert np.sum(w * p) == pytest.approx(budget, rel=1e-9)

    def test_rejects_degenerate_inputs(self):
        with pytest.raises(ValueError):
            waterfill_bins(np.zeros(3), np.ones(3), 1.0)
        with pytest.raises(ValueError):
            waterfill_bins(np.array([1.0, -1.0]), np.ones(2), 1.0)
        with pytest.raises(ValueError):
            waterfill_bins(np.array([1.0]), np.ones(1), 0.0)


class TestWaterfillSpectrum:
    def test_allocation_integrates_to_budget(self):
        g = grid(count=21)
        k = Spectrum(g, 10 ** np.linspace(-1, 1, g.count))
        alloc = waterfill(k, 0.01)
        assert isinstance(alloc, PowerAllocation)
        assert integrate(alloc.psd) == pytest.approx(0.01, rel=1e-9)

    def test_allocation_validation(self):
        g = grid(count=3)
        with pytest.raises(ValueError):
            PowerAllocation(g, Spectrum(g, np.array([1.0, 1.0, 1.0])), 5.0)


class TestAllocateConcave:
    def test_matches_waterfilling_on_log_utility(self):
        # ln(1 + p*k) marginals reproduce plain waterfilling
        k = np.array([0.5, 1.0, 4.0, 10.0])
        w = np.ones(4)
        budget = 2.0

        def marginal(p):
            return k / (1.0 + p * k)

        p = allocate_concave(marginal, w, budget, p_max=budget / np.min(w))
        ref = waterfill_bins(k, w, budget)
        np.testing.assert_allclose(p, ref, atol=1e-8 * budget)

    def test_budget_conserved(self):
        k = np.array([1.0, 2.0, 3.0])
        w = np.array([1.0, 0.5, 2.0])

        def marginal(p):
            return k / (1.0 + p * k)

        p = allocate_concave(marginal, w, 1.5, p_max=10.0)
        assert np.sum(w * p) == pytest.approx(1.5, rel=1e-8)
