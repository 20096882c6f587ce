"""Frequency-domain numerics shared by all relaying schemes: trapezoidal
integration, Shannon rates, and waterfilling power allocation."""

from dataclasses import dataclass

import numpy as np

from .link import FrequencyGrid, Spectrum

WATERFILL_TOL = 1e-9
WATERFILL_MAX_ITER = 200


@dataclass(frozen=True)
class PowerAllocation:
    """A transmit PSD together with the budget it integrates to."""

    grid: FrequencyGrid
    psd: Spectrum           # W/Hz
    total_power: float      # W

    def __post_init__(self):
        if np.any(self.psd.values < 0):
            raise ValueError("allocation PSD must be >= 0")
        total = integrate(self.psd)
        if abs(total - self.total_power) > 1e-9 * max(self.total_power, 1e-300):
            raise ValueError("allocation does not integrate to its budget")


def trapezoid_weights(grid):
    """Quadrature weights such that integral = sum(w * values)."""
    w = np.full(grid.count, grid.step)
    w[0] = w[-1] = grid.step / 2
    return w


def integrate(s):
    """Trapezoidal integral of a spectrum over its grid."""
    return float(np.trapezoid(s.values, dx=s.grid.step))


def shannon_rate(snr, duplex_factor=0.5):
    """Achievable rate of parallel Gaussian channels, bit/s.

    duplex_factor is 1/2 for half duplex (two time slots) and 1 for
    full duplex or direct transmission.
    """
    values = np.asarray(snr.values, dtype=float)
    if np.any(values < 0):
        raise ValueError("SNR must be >= 0 pointwise")
    return duplex_factor * float(
        np.trapezoid(np.log2(1.0 + values), dx=snr.grid.step))


def mrc_snr(snr1, snr2):
    """Maximum-ratio combining of two receptions: SNRs add pointwise."""
    if snr1.grid != snr2.grid:
        raise ValueError("SNR spectra live on different grids")
    return Spectrum(snr1.grid, snr1.values + snr2.values)


def waterfill_bins(k, weights, budget):
    """Waterfilling over discrete bins.

    Maximizes sum(w*log2(1 + p*k)) subject to sum(w*p) = budget, p >= 0.
    Returns the per-bin PSD max(level - 1/k, 0) with the water level found
    by bisection (the spent power is monotone increasing in the level).
    """
    k = np.asarray(k, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if np.any(k < 0):
        raise ValueError("channel quality k must be >= 0")
    if not np.any(k > 0):
        raise ValueError("waterfilling over an all-zero channel")
    if budget <= 0:
        raise ValueError("budget must be > 0")
    inv_k = np.where(k > 0, 1.0 / np.where(k > 0, k, 1.0), np.inf)
    # bisect on the water level measured from the best bin's 1/k; the
    # shift keeps the arithmetic well conditioned when budget << min(1/k)
    q = inv_k - np.min(inv_k)
    finite = np.isfinite(q)
    lo = 0.0
    hi = np.max(q[finite]) + budget / np.min(weights)
    level = hi
    for _ in range(WATERFILL_MAX_ITER):
        level = 0.5 * (lo + hi)
        spent = np.sum(weights * np.maximum(level - q, 0.0))
        if abs(spent - budget) <= WATERFILL_TOL * budget:
            break
        if spent > budget:
            hi = level
        else:
            lo = level
    p = np.maximum(level - q, 0.0)
    # exact budget on the final active set, removes the bisection residual
    active = p > 0
    if not np.any(active):
        active = q == 0
    p[active] += (budget - np.sum(weights * p)) / np.sum(weights[active])
    return np.maximum(p, 0.0)


def waterfill(k, budget):
    """Waterfilling of a power budget against a channel-quality spectrum.

    k holds SNR-per-unit-power K(f) (i.e. SNR(f) = P(f)*K(f)); the result
    integrates to the budget under the trapezoidal rule.
    """
    psd = waterfill_bins(k.values, trapezoid_weights(k.grid), budget)
    return PowerAllocation(grid=k.grid, psd=Spectrum(k.grid, psd),
                           total_power=budget)


def allocate_concave(marginal, weights, budget, p_max, max_iter=80):
    """Generic separable concave allocation by KKT bisection.

    marginal(p) returns the per-bin derivative of the utility (vectorized,
    strictly decreasing in p).  Solves max sum(w*u(p)) s.t. sum(w*p) =
    budget by bisecting the multiplier; per-bin inversion of the marginal
    is itself a vectorized bisection on [0, p_max].
    """
    weights = np.asarray(weights, dtype=float)

    def alloc_for(nu):
        lo = np.zeros_like(weights)
        hi = np.full_like(weights, p_max)
        # bins whose marginal at zero is below nu stay at zero
        inactive = marginal(lo) <= nu
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            too_high = marginal(mid) > nu
            lo = np.where(too_high, mid, lo)
            hi = np.where(too_high, hi, mid)
        p = 0.5 * (lo + hi)
        return np.where(inactive, 0.0, p)

    nu_hi = float(np.max(marginal(np.zeros_like(weights))))
    if nu_hi <= 0:
        raise ValueError("utility has no ascent direction at zero power")
    nu_lo = 0.0
    for _ in range(100):
        nu = 0.5 * (nu_lo + nu_hi)
        spent = float(np.sum(weights * alloc_for(nu)))
        if abs(spent - budget) <= 1e-9 * budget:
            break
        if spent > budget:
            nu_lo = nu
        else:
            nu_hi = nu
    p = alloc_for(nu)
    active = p > 0
    if np.any(active):
        p[active] += (budget - np.sum(weights * p)) / np.sum(weights[active])
    return np.maximum(p, 0.0)
