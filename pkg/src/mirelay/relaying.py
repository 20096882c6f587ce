"""Achievable-rate engines for amplify-, filter- and decode-and-forward
relaying in half- and full-duplex modes.

The relayed SNR of the second (active) path is expressed through the two
hop SNRs: with x = P_St*g_sr/noise_relay and y = P_Rt*g_rd/noise_dest the
combined value is x*y/(1 + x + y), which is algebraically identical to the
amplified-noise form and avoids divisions by vanishing gains.
"""

from dataclasses import dataclass

import numpy as np

from .link import Spectrum
from .spectra import (PowerAllocation, shannon_rate, trapezoid_weights,
                      waterfill_bins)

SCHEMES = ("af", "ff", "df", "direct")
DUPLEX_MODES = ("hd", "fd")


@dataclass(frozen=True)
class SchemeConfig:
    scheme: str
    duplex: str
    source_power: float         # W
    relay_power: float          # W
    max_iterations: int = 100
    convergence_tol: float = 1e-6

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.duplex not in DUPLEX_MODES:
            raise ValueError(f"unknown duplex mode {self.duplex!r}")
        if self.source_power < 0 or self.relay_power < 0:
            raise ValueError("powers must be >= 0")


@dataclass(frozen=True)
class RateResult:
    rate: float                      # bit/s
    source_allocation: PowerAllocation | None
    relay_allocation: PowerAllocation | None
    amplification: float | np.ndarray | None
    snr: Spectrum | None             # combined SNR (HD) or SINR (FD)
    iterations_used: int = 0
    converged: bool = True


def _zero_result(link):
    grid = link.grid
    return RateResult(rate=0.0, source_allocation=None, relay_allocation=None,
                      amplification=0.0,
                      snr=Spectrum(grid, np.zeros(grid.count)))


def af_amplification(link, source_psd, relay_power):
    """Flat amplification that spends exactly the relay power budget."""
    if relay_power < 0:
        raise ValueError("relay_power must be >= 0")
    integrand = ((source_psd * link.gain_sr.values + link.noise_relay.values)
                 * link.gain_rr.values)
    total = np.trapezoid(integrand, dx=link.grid.step)
    return float(np.sqrt(relay_power / total))


def _af_snr_quality(link, amp):
    """K(f) with SNR_MRC(f) = P_St(f) * K(f) for a fixed amplification."""
    a2 = amp * amp
    relayed_noise = (a2 * link.gain_rr.values * link.gain_rd.values
                     * link.noise_relay.values + link.noise_dest.values)
    return (link.gain_sd_passive.values / link.noise_dest.values
            + a2 * link.gain_sd_active.values / relayed_noise)


def af_rate_hd(link, config):
    """Iterated amplification / waterfilling fixed point for AF relaying."""
    if config.source_power == 0 or config.relay_power == 0:
        return _zero_result(link)
    grid = link.grid
    weights = trapezoid_weights(grid)
    psd = np.full(grid.count, config.source_power / grid.width)
    rate = 0.0
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        amp = af_amplification(link, psd, config.relay_power)
        quality = _af_snr_quality(link, amp)
        psd = waterfill_bins(quality, weights, config.source_power)
        new_rate = shannon_rate(Spectrum(grid, psd * quality), 0.5)
        if abs(new_rate - rate) <= config.convergence_tol * max(new_rate, 1e-300):
            rate = new_rate
            converged = True
            break
        rate = new_rate
    amp = af_amplification(link, psd, config.relay_power)
    snr = psd * _af_snr_quality(link, amp)
    return RateResult(
        rate=rate,
        source_allocation=PowerAllocation(grid, Spectrum(grid, psd),
                                          config.source_power),
        relay_allocation=None,
        amplification=amp,
        snr=Spectrum(grid, snr),
        iterations_used=iterations,
        converged=converged,
    )


def _relay_psd_for_flat_amp(link, source_psd, amp):
    """Relay transmit PSD implied by a flat amplification constant."""
    return (amp * amp
            * (source_psd * link.gain_sr.values + link.noise_relay.values)
            * link.gain_rr.values)


def _ff_snr(link, source_psd, relay_psd):
    """Combined MRC SNR of the FF link for explicit PSD pairs."""
    x = source_psd * link.gain_sr.values / link.noise_relay.values
    y = relay_psd * link.gain_rd.values / link.noise_dest.values
    snr1 = source_psd * link.gain_sd_passive.values / link.noise_dest.values
    return snr1 + x * y / (1.0 + x + y)


def _bisect_budget(alloc_of_level, weights, budget):
    """Find the Lagrangian water level that spends exactly the budget.

    alloc_of_level(w) must be pointwise non-decreasing in the level w.
    The level is first bracketed by geometric expansion, then bisected.
    """
    hi = 1.0
    for _ in range(200):
        if np.sum(weights * alloc_of_level(hi)) >= budget:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if np.sum(weights * alloc_of_level(mid)) > budget:
            hi = mid
        else:
            lo = mid
    p = alloc_of_level(0.5 * (lo + hi))
    active = p > 0
    if not np.any(active):
        active = np.ones_like(p, dtype=bool)
    p[active] += (budget - np.sum(weights * p)) / np.sum(weights[active])
    return np.maximum(p, 0.0)


def _ff_optimize_relay(x, s1, c, weights, budget):
    """Relay-side FF subproblem: closed-form KKT point per frequency.

    Maximizes sum w*ln(1+s1+x*c*p/(1+x+c*p)) s.t. sum w*p = budget.  The
    stationarity condition is a quadratic in z = 1+x+c*p whose positive
    root gives the allocation for a given multiplier.
    """
    t = 1.0 + s1 + x
    xc1 = x * c * (1.0 + x)
    usable = xc1 > 0

    def alloc(level):
        with np.errstate(divide="ignore", invalid="ignore"):
            nu = 1.0 / level if level > 0 else np.inf
            half = nu * x * (1.0 + x)
            z = (half + np.sqrt(half ** 2 + 4.0 * nu * t * xc1)) / (2.0 * nu * t)
            p = (z - 1.0 - x) / np.where(usable, c, 1.0)
        return np.where(usable, np.maximum(p, 0.0), 0.0)

    return _bisect_budget(alloc, weights, budget)


def _ff_optimize_source(y, gp, a, weights, budget, p_cap):
    """Source-side FF subproblem via vectorized Newton on the KKT cubic.

    Utility per bin is ln(1+P*gp+snr2(P)) with snr2 = a*P*y/(1+y+a*P);
    stationarity in z = 1+y+a*P is a cubic whose sign flips exactly once
    right of z = 1+y, so a vectorized sign bisection finds the root (or
    pins the bin at 0 / the cap when the multiplier is out of range).
    """
    b = 1.0 + y
    yy = y * b
    relayed = a * y > 0
    a_safe = np.where(a > 0, a, 1.0)
    inv_gp = np.where(gp > 0, 1.0 / np.where(gp > 0, gp, 1.0), np.inf)
    k3 = gp / a_safe
    k2 = b * (1.0 - k3)
    c0 = -a * yy
    zlo0 = np.broadcast_to(b, a_safe.shape)
    zhi0 = b + a * p_cap

    def alloc(level):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            nu = 1.0 / level if level > 0 else np.inf
            # bins with no relayed path degenerate to plain waterfilling
            p_wf = np.maximum(level - inv_gp, 0.0)
            c3 = nu * k3
            c2 = nu * k2 - gp
            c1 = -nu * yy
            zlo, zhi = zlo0, zhi0
            for _ in range(48):
                zm = 0.5 * (zlo + zhi)
                below_root = ((c3 * zm + c2) * zm + c1) * zm + c0 < 0
                zlo = np.where(below_root, zm, zlo)
                zhi = np.where(below_root, zhi, zm)
            p = np.clip((0.5 * (zlo + zhi) - b) / a_safe, 0.0, p_cap)
        return np.where(relayed, p, np.minimum(p_wf, p_cap))

    return _bisect_budget(alloc, weights, budget)


def ff_rate_hd(link, config):
    """Alternating optimization of source and relay transmit PSDs.

    Starts from independently waterfilled hop allocations and alternates
    between the two concave subproblems until the rate stalls.  The AF
    fixed point (flat amplification) is a feasible FF operating point and
    is kept as a fallback, so the FF rate never drops below the AF rate.
    """
    if config.source_power == 0 or config.relay_power == 0:
        return _zero_result(link)
    grid = link.grid
    weights = trapezoid_weights(grid)

    g_sr = link.gain_sr.values / link.noise_relay.values
    g_rd = link.gain_rd.values / link.noise_dest.values
    g_p = link.gain_sd_passive.values / link.noise_dest.values

    src = waterfill_bins(g_sr, weights, config.source_power)
    rel = waterfill_bins(g_rd, weights, config.relay_power)

    def rate_of(s, r):
        return shannon_rate(Spectrum(grid, _ff_snr(link, s, r)), 0.5)

    rate = rate_of(src, rel)
    converged = False
    iterations = 0
    src_cap = config.source_power / np.min(weights)
    for iterations in range(1, config.max_iterations + 1):
        # subproblem 1: source PSD for fixed relay PSD
        src = _ff_optimize_source(rel * g_rd, g_p, g_sr, weights,
                                  config.source_power, src_cap)
        # subproblem 2: relay PSD for fixed source PSD
        rel = _ff_optimize_relay(src * g_sr, src * g_p, g_rd, weights,
                                 config.relay_power)

        new_rate = rate_of(src, rel)
        if new_rate < rate * (1.0 - 1e-9):
            raise RuntimeError("FF alternation decreased the objective")
        if abs(new_rate - rate) <= config.convergence_tol * max(new_rate, 1e-300):
            rate = new_rate
            converged = True
            break
        rate = new_rate

    # the AF operating point is FF-feasible; fall back to it if the
    # alternation landed in a worse stationary point
    af = af_rate_hd(link, config)
    src_af = af.source_allocation.psd.values
    rel_af = _relay_psd_for_flat_amp(link, src_af, af.amplification)
    rel_af *= config.relay_power / np.trapezoid(rel_af, dx=grid.step)
    if max(rate_of(src_af, rel_af), af.rate) > rate:
        src, rel = src_af, rel_af
        # same mathematical operating point as AF, up to quadrature rounding
        rate = max(rate_of(src, rel), af.rate)

    amp = np.sqrt(rel / np.maximum(
        (src * link.gain_sr.values + link.noise_relay.values)
        * link.gain_rr.values, 1e-300))
    return RateResult(
        rate=rate,
        source_allocation=PowerAllocation(grid, Spectrum(grid, src),
                                          config.source_power),
        relay_allocation=PowerAllocation(grid, Spectrum(grid, rel),
                                         config.relay_power),
        amplification=amp,
        snr=Spectrum(grid, _ff_snr(link, src, rel)),
        iterations_used=iterations,
        converged=converged,
    )


def df_rate_hd(link, config):
    """Decode-and-forward: independent waterfilling of the two hops."""
    if config.source_power == 0 or config.relay_power == 0:
        return _zero_result(link)
    grid = link.grid
    weights = trapezoid_weights(grid)
    k_sr = link.gain_sr.values / link.noise_relay.values
    k_rd = link.gain_rd.values / link.noise_dest.values
    src = waterfill_bins(k_sr, weights, config.source_power)
    rel = waterfill_bins(k_rd, weights, config.relay_power)
    c_sr = shannon_rate(Spectrum(grid, src * k_sr), 1.0)
    c_rd = shannon_rate(Spectrum(grid, rel * k_rd), 1.0)
    snr = src * k_sr if c_sr <= c_rd else rel * k_rd
    return RateResult(
        rate=0.5 * min(c_sr, c_rd),
        source_allocation=PowerAllocation(grid, Spectrum(grid, src),
                                          config.source_power),
        relay_allocation=PowerAllocation(grid, Spectrum(grid, rel),
                                         config.relay_power),
        amplification=None,
        snr=Spectrum(grid, snr),
    )


def af_ff_rate_fd(link, config, hd_solution):
    """Full-duplex rate of AF/FF with the half-duplex optimized parameters.

    The passively received source signal becomes interference for the
    relayed stream; the relay cancels its own transmission perfectly.
    """
    if hd_solution.source_allocation is None:
        return _zero_result(link)
    grid = link.grid
    src = hd_solution.source_allocation.psd.values
    amp = hd_solution.amplification
    a2 = np.asarray(amp) ** 2
    relayed_noise = (a2 * link.gain_rr.values * link.gain_rd.values
                     * link.noise_relay.values + link.noise_dest.values)
    snr2 = a2 * src * link.gain_sd_active.values / relayed_noise
    snr1 = src * link.gain_sd_passive.values / link.noise_dest.values
    # A^2 |H_SD,a|^2 / |H_SR|^2 reduces to A^2 |H_RR|^2 |H_RD|^2
    boost = (a2 * link.gain_rr.values * link.gain_rd.values
             * link.noise_relay.values / link.noise_dest.values)
    sinr = snr2 / (1.0 + snr1 * (1.0 + boost))
    return RateResult(
        rate=shannon_rate(Spectrum(grid, sinr), 1.0),
        source_allocation=hd_solution.source_allocation,
        relay_allocation=hd_solution.relay_allocation,
        amplification=amp,
        snr=Spectrum(grid, sinr),
        iterations_used=hd_solution.iterations_used,
        converged=hd_solution.converged,
    )


def df_rate_fd(link, config, hd_solution=None):
    """Full-duplex decode-and-forward with passive-path interference."""
    if hd_solution is None:
        hd_solution = df_rate_hd(link, config)
    if hd_solution.source_allocation is None:
        return _zero_result(link)
    grid = link.grid
    src = hd_solution.source_allocation.psd.values
    rel = hd_solution.relay_allocation.psd.values
    c_sr = shannon_rate(
        Spectrum(grid, src * link.gain_sr.values / link.noise_relay.values),
        1.0)
    sinr_rd = (rel * link.gain_rd.values
               / (link.noise_dest.values
                  + src * link.gain_sd_passive.values))
    c_rd = shannon_rate(Spectrum(grid, sinr_rd), 1.0)
    snr = (src * link.gain_sr.values / link.noise_relay.values
           if c_sr <= c_rd else sinr_rd)
    return RateResult(
        rate=min(c_sr, c_rd),
        source_allocation=hd_solution.source_allocation,
        relay_allocation=hd_solution.relay_allocation,
        amplification=None,
        snr=Spectrum(grid, snr),
    )


def direct_rate(direct_link, source_power):
    """Waterfilled rate of the point-to-point link without a relay."""
    if source_power == 0:
        grid = direct_link.grid
        return RateResult(rate=0.0, source_allocation=None,
                          relay_allocation=None, amplification=None,
                          snr=Spectrum(grid, np.zeros(grid.count)))
    grid = direct_link.grid
    k = direct_link.gain.values / direct_link.noise.values
    psd = waterfill_bins(k, trapezoid_weights(grid), source_power)
    snr = psd * k
    return RateResult(
        rate=shannon_rate(Spectrum(grid, snr), 1.0),
        source_allocation=PowerAllocation(grid, Spectrum(grid, psd),
                                          source_power),
        relay_allocation=None,
        amplification=None,
        snr=Spectrum(grid, snr),
    )


def evaluate(link, config):
    """Dispatch to the rate engine selected by the scheme configuration."""
    if config.scheme == "af":
        hd = af_rate_hd(link, config)
        return hd if config.duplex == "hd" else af_ff_rate_fd(link, config, hd)
    if config.scheme == "ff":
        hd = ff_rate_hd(link, config)
        return hd if config.duplex == "hd" else af_ff_rate_fd(link, config, hd)
    if config.scheme == "df":
        hd = df_rate_hd(link, config)
        return hd if config.duplex == "hd" else df_rate_fd(link, config, hd)
    raise ValueError(f"evaluate() does not handle scheme {config.scheme!r}")
