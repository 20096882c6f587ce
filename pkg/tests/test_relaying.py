"""Rate engines: amplify-, filter- and decode-and-forward, both duplexes."""

from dataclasses import replace

import numpy as np
import pytest

import oracle
from mirelay.link import (FrequencyGrid, LinkModel, Spectrum,
                          build_link_model, grid_for)
from mirelay.medium import (CoilDesign, RelayGeometry, SoilMedium,
                            make_circuit, mutual_inductance)
from mirelay.relaying import (RateResult, SchemeConfig, af_amplification,
                              af_ff_rate_fd, af_rate_hd, df_rate_fd,
                              df_rate_hd, evaluate, ff_rate_hd)
from mirelay.spectra import integrate

MEDIUM = SoilMedium(conductivity=0.01, relative_permittivity=7.0)
COIL = CoilDesign(coil_radius=0.15, wire_radius=5e-4, windings=500)


def standard_link(f0=1e5, d_sr=10.0, d_rd=10.0, count=257):
    params = make_circuit(COIL, f0)
    grid = grid_for(params, count=count)
    return build_link_model(params, COIL, RelayGeometry(d_sr, d_rd),
                            MEDIUM, grid)


def toy_link(g_sr, g_rr, g_rd, g_p, n_r, n_d, count=None):
    """Hand-built link model for closed-form checks."""
    count = count if count else len(np.atleast_1d(g_sr))
    grid = FrequencyGrid(start=1e3, step=100.0, count=count)

    def spec(v):
        return Spectrum(grid, np.broadcast_to(
            np.asarray(v, dtype=float), (count,)).copy())

    return LinkModel(grid=grid, gain_sr=spec(g_sr), gain_rr=spec(g_rr),
                     gain_rd=spec(g_rd), gain_sd_passive=spec(g_p),
                     gain_sd_active=spec(np.asarray(g_sr) * np.asarray(g_rr)
                                         * np.asarray(g_rd)),
                     noise_relay=spec(n_r), noise_dest=spec(n_d))


def config(scheme, src=5e-3, rel=5e-3, duplex="hd"):
    return SchemeConfig(scheme=scheme, duplex=duplex, source_power=src,
                        relay_power=rel)


class TestSchemeConfig:
    def test_rejects_unknown_scheme(self):
        with pytest.raises(ValueError):
            SchemeConfig("nf", "hd", 1.0, 1.0)

    def test_rejects_unknown_duplex(self):
        with pytest.raises(ValueError):
            SchemeConfig("af", "tdd", 1.0, 1.0)

    def test_rejects_negative_power(self):
        with pytest.raises(ValueError):
            SchemeConfig("af", "hd", -1.0, 1.0)


class TestAmplification:
    def test_budget_spent_exactly(self):
        link = standard_link()
        psd = np.full(link.grid.count, 5e-3 / link.grid.width)
        amp = af_amplification(link, psd, 5e-3)
        spent = np.trapezoid(
            amp ** 2 * (psd * link.gain_sr.values + link.noise_relay.values)
            * link.gain_rr.values, dx=link.grid.step)
        assert spent == pytest.approx(5e-3, rel=1e-12)

    def test_matches_oracle(self):
        params = make_circuit(COIL, 1e5)
        grid = grid_for(params, count=65)
        link = build_link_model(params, COIL, RelayGeometry(10.0, 10.0),
                                MEDIUM, grid)
        f = grid.frequencies
        m_sr = mutual_inductance(COIL, MEDIUM, 10.0, 2.0, f)
        m_rd = mutual_inductance(COIL, MEDIUM, 10.0, 2.0, f)
        psd = np.linspace(1.0, 2.0, grid.count) * 1e-8
        amp = af_amplification(link, psd, 5e-3)
        ref = oracle.af_amplification(
            list(f), params.inductance, params.capacitance,
            params.wire_resistance, params.load_resistance,
            list(m_sr), list(m_rd), list(psd),
            list(link.noise_relay.values), 5e-3)
        assert amp == pytest.approx(ref, rel=1e-10)

    def test_rejects_negative_budget(self):
        link = standard_link(count=33)
        with pytest.raises(ValueError):
            af_amplification(link, np.zeros(link.grid.count), -1.0)


class TestAmplifyForward:
    def test_zero_power_zero_rate(self):
        link = standard_link(count=33)
        assert af_rate_hd(link, config("af", src=0.0)).rate == 0.0
        assert af_rate_hd(link, config("af", rel=0.0)).rate == 0.0

    def test_positive_rate_and_budgets(self):
        link = standard_link()
        r = af_rate_hd(link, config("af"))
        assert r.rate > 0
        assert r.converged
        assert integrate(r.source_allocation.psd) == pytest.approx(
            5e-3, rel=1e-9)
        assert np.all(r.snr.values >= 0)

    def test_more_power_more_rate(self):
        link = standard_link()
        r1 = af_rate_hd(link, config("af", src=2e-3, rel=2e-3))
        r2 = af_rate_hd(link, config("af", src=8e-3, rel=8e-3))
        assert r2.rate > r1.rate


class TestFilterForward:
    def test_zero_power_zero_rate(self):
        link = standard_link(count=33)
        assert ff_rate_hd(link, config("ff", src=0.0)).rate == 0.0

    def test_never_below_af(self):
        for d_sr, d_rd in [(10.0, 10.0), (5.0, 15.0), (16.0, 4.0)]:
            link = standard_link(d_sr=d_sr, d_rd=d_rd)
            af = af_rate_hd(link, config("af"))
            ff = ff_rate_hd(link, config("ff"))
            assert ff.rate >= af.rate * (1 - 1e-9)

    def test_budgets_conserved(self):
        link = standard_link()
        r = ff_rate_hd(link, config("ff", src=6e-3, rel=4e-3))
        assert integrate(r.source_allocation.psd) == pytest.approx(
            6e-3, rel=1e-9)
        assert integrate(r.relay_allocation.psd) == pytest.approx(
            4e-3, rel=1e-9)

    def test_flat_two_bin_closed_form(self):
        # symmetric flat link: equal power in every bin is optimal, and
        # the rate follows from the two-hop SNR identity x*y/(1+x+y)
        link = toy_link(g_sr=1e-6, g_rr=1.0, g_rd=1e-6, g_p=0.0,
                        n_r=1e-12, n_d=1e-12, count=5)
        r = ff_rate_hd(link, config("ff", src=4e-4, rel=4e-4))
        w = link.grid.width
        x = (4e-4 / w) * 1e-6 / 1e-12
        expected = 0.5 * w * np.log2(1.0 + x * x / (1.0 + 2 * x))
        assert r.rate == pytest.approx(expected, rel=1e-6)


class TestDecodeForward:
    def test_zero_power_zero_rate(self):
        link = standard_link(count=33)
        assert df_rate_hd(link, config("df", rel=0.0)).rate == 0.0

    def test_half_of_bottleneck_hop(self):
        link = standard_link()
        r = df_rate_hd(link, config("df"))
        from mirelay.spectra import shannon_rate, waterfill_bins, \
            trapezoid_weights
        w = trapezoid_weights(link.grid)
        k_sr = link.gain_sr.values / link.noise_relay.values
        k_rd = link.gain_rd.values / link.noise_dest.values
        c_sr = shannon_rate(Spectrum(
            link.grid, waterfill_bins(k_sr, w, 5e-3) * k_sr), 1.0)
        c_rd = shannon_rate(Spectrum(
            link.grid, waterfill_bins(k_rd, w, 5e-3) * k_rd), 1.0)
        assert r.rate == pytest.approx(0.5 * min(c_sr, c_rd), rel=1e-12)

    def test_symmetric_link_balanced_hops(self):
        link = standard_link(d_sr=10.0, d_rd=10.0)
        r = df_rate_hd(link, config("df"))
        # with equal hop channels and equal split, either hop binds
        k_sr = link.gain_sr.values / link.noise_relay.values
        k_rd = link.gain_rd.values / link.noise_dest.values
        np.testing.assert_allclose(k_sr, k_rd, rtol=1e-4)
        assert r.rate > 0


class TestFullDuplex:
    def test_ratio_at_most_two(self):
        link = standard_link()
        for scheme, hd_fn, fd_fn in [("af", af_rate_hd, af_ff_rate_fd),
                                     ("ff", ff_rate_hd, af_ff_rate_fd)]:
            cfg = config(scheme)
            hd = hd_fn(link, cfg)
            fd = fd_fn(link, cfg, hd)
            assert fd.rate <= 2 * hd.rate * (1 + 1e-9)
        cfg = config("df")
        hd = df_rate_hd(link, cfg)
        fd = df_rate_fd(link, cfg, hd)
        assert fd.rate <= 2 * hd.rate * (1 + 1e-9)

    def test_df_doubles_without_passive_interference(self):
        link = standard_link()
        cfg = config("df")
        hd = df_rate_hd(link, cfg)
        quiet = replace(link, gain_sd_passive=Spectrum(
            link.grid, np.zeros(link.grid.count)),
            gain_sd_active=link.gain_sd_active)
        fd = df_rate_fd(quiet, cfg, df_rate_hd(quiet, cfg))
        assert fd.rate == pytest.approx(2 * hd.rate, rel=1e-12)

    def test_zero_power_zero_rate(self):
        link = standard_link(count=33)
        cfg = config("af", src=0.0)
        assert af_ff_rate_fd(link, cfg, af_rate_hd(link, cfg)).rate == 0.0
        cfg = config("df", src=0.0)
        assert df_rate_fd(link, cfg).rate == 0.0

    def test_af_interference_lowers_rate_below_double(self):
        # a link with a strong passive path must lose more than half of
        # the ideal doubling
        link = standard_link(d_sr=16.0, d_rd=4.0)
        cfg = config("af")
        hd = af_rate_hd(link, cfg)
        fd = af_ff_rate_fd(link, cfg, hd)
        assert fd.rate < 2 * hd.rate


class TestEvaluateDispatch:
    def test_all_schemes_run(self):
        link = standard_link()
        rates = {}
        for scheme in ("af", "ff", "df"):
            for duplex in ("hd", "fd"):
                r = evaluate(link, config(scheme, duplex=duplex))
                assert isinstance(r, RateResult)
                rates[scheme, duplex] = r.rate
        assert all(v > 0 for v in rates.values())

    def test_direct_not_dispatchable(self):
        link = standard_link(count=33)
        with pytest.raises(ValueError):
            evaluate(link, config("direct"))
