"""Channel power gains and noise power spectral densities of the
source-relay-destination circuit, evaluated on a uniform frequency grid.

Gains are ratios of receive to transmit PSDs of the coupled three-circuit
network; noise PSDs are the thermal contributions of the series and load
resistors.  The relayed composite gain factors exactly into the three hop
gains, which the model stores explicitly.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .medium import BOLTZMANN, circuit_impedance, mutual_inductance

DEFAULT_GRID_POINTS = 2049
DEFAULT_RELATIVE_BANDWIDTH = 0.5  # band width as a fraction of f0


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform frequency grid start + step*[0..count)."""

    start: float  # Hz
    step: float   # Hz
    count: int

    def __post_init__(self):
        if self.step <= 0 or self.count < 2 or self.start <= 0:
            raise ValueError("grid needs start > 0, step > 0, count >= 2")

    @property
    def frequencies(self):
        return self.start + self.step * np.arange(self.count)

    @property
    def width(self):
        return self.step * (self.count - 1)

    @classmethod
    def around(cls, f0, width=None, count=DEFAULT_GRID_POINTS):
        """Band of the given width centered on the carrier f0."""
        if width is None:
            width = DEFAULT_RELATIVE_BANDWIDTH * f0
        start = f0 - width / 2
        if start <= 0:
            raise ValueError("band extends to non-positive frequencies")
        return cls(start=start, step=width / (count - 1), count=count)


@dataclass(frozen=True)
class Spectrum:
    """Real or complex samples of a function of frequency on a grid."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.count,):
            raise ValueError("values length does not match grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("spectrum contains NaN/Inf")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class LinkModel:
    """The five channel power gains and two noise PSDs of one relay link."""

    grid: FrequencyGrid
    gain_sr: Spectrum
    gain_rr: Spectrum
    gain_rd: Spectrum
    gain_sd_passive: Spectrum
    gain_sd_active: Spectrum
    noise_relay: Spectrum   # W/Hz
    noise_dest: Spectrum    # W/Hz


@dataclass(frozen=True)
class DirectLinkModel:
    """Point-to-point two-coil link: one gain, one receiver noise PSD."""

    grid: FrequencyGrid
    gain: Spectrum
    noise: Spectrum


def resonance_width(params):
    """3 dB full width of the series resonance, Hz."""
    return ((params.wire_resistance + params.load_resistance)
            / (2 * np.pi * params.inductance))


def grid_for(params, count=DEFAULT_GRID_POINTS,
             relative_bandwidth=DEFAULT_RELATIVE_BANDWIDTH,
             samples_per_width=4):
    """Default evaluation band for a circuit: centered on f0, never wider
    than relative_bandwidth*f0, and never so wide that the grid step fails
    to resolve the resonance (at least samples_per_width points per 3 dB
    width)."""
    width = min(relative_bandwidth * params.resonance_frequency,
                (count - 1) * resonance_width(params) / samples_per_width)
    return FrequencyGrid.around(params.resonance_frequency, width, count)


def source_tx_psd(params, m_sr, m_rd, f, voltage_density=1.0):
    """Transmit PSD at the source for a unit-variance drive, W/Hz."""
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    num = zg ** 2 + (w * m_rd) ** 2
    den = zg * (zg ** 2 + w ** 2 * (m_sr ** 2 + m_rd ** 2))
    return (voltage_density / 2) * np.abs(num / den)


def relay_rx_psd(params, m_sr, m_rd, f, voltage_density=1.0):
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    den = zg ** 2 + w ** 2 * (m_sr ** 2 + m_rd ** 2)
    return ((voltage_density / 2) * np.abs(w * m_sr / den) ** 2
            * params.load_resistance)


def relay_tx_psd(params, m_sr, m_rd, f, voltage_density=1.0):
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    den = zg ** 2 + w ** 2 * (m_sr ** 2 + m_rd ** 2)
    return (voltage_density / 2) * np.abs(zg / den)


def dest_rx_psd_passive(params, m_sr, m_rd, f, voltage_density=1.0):
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    num = w ** 2 * (m_sr * m_rd)
    den = zg * (zg ** 2 + w ** 2 * (m_sr ** 2 + m_rd ** 2))
    return ((voltage_density / 2) * np.abs(num / den) ** 2
            * params.load_resistance)


def dest_rx_psd_active(params, m_sr, m_rd, f, voltage_density=1.0):
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    den = zg ** 2 + w ** 2 * (m_sr ** 2 + m_rd ** 2)
    return ((voltage_density / 2) * np.abs(1j * w * m_rd / den) ** 2
            * params.load_resistance)


def channel_gain_sr(params, m_sr, m_rd, f):
    """Source-to-relay channel power gain."""
    return (relay_rx_psd(params, m_sr, m_rd, f)
            / source_tx_psd(params, m_sr, m_rd, f))


def channel_gain_sd_passive(params, m_sr, m_rd, f):
    """Source-to-destination power gain of the passive (untouched) path."""
    return (dest_rx_psd_passive(params, m_sr, m_rd, f)
            / source_tx_psd(params, m_sr, m_rd, f))


def channel_gain_rd(params, m_sr, m_rd, f):
    """Relay-to-destination channel power gain."""
    return (dest_rx_psd_active(params, m_sr, m_rd, f)
            / relay_tx_psd(params, m_sr, m_rd, f))


def relay_mapping_gain(params, m_sr, m_rd, f):
    """Loss of mapping the signal at the relay load onto its retransmission."""
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    den = zg ** 2 + w ** 2 * (m_sr ** 2 + m_rd ** 2)
    return np.abs(zg / den) * params.load_resistance


def noise_psd_relay(params, m_sr, m_rd, temperature, f):
    """Thermal noise PSD seen at the relay load, W/Hz."""
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    msq = m_sr ** 2 + m_rd ** 2
    r, rl = params.wire_resistance, params.load_resistance
    num = np.abs(zg) ** 2 + w ** 2 * msq
    den = 2 * np.abs(zg ** 2 + w ** 2 * msq) ** 2
    return 4 * BOLTZMANN * temperature * (rl * r + rl ** 2) * num / den


def noise_psd_dest(params, m_sr, m_rd, temperature, f):
    """Thermal noise PSD at the destination load (all three resistor pairs)."""
    zg = circuit_impedance(params, f)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    msq = m_sr ** 2 + m_rd ** 2
    r, rl = params.wire_resistance, params.load_resistance
    scale = 4 * BOLTZMANN * temperature * (rl * r + rl ** 2)
    den = 2 * np.abs(zg * (zg ** 2 + w ** 2 * msq)) ** 2
    term1 = np.abs(zg ** 2 - (w * m_sr) ** 2) ** 2
    term2 = w ** 4 * (m_sr * m_rd) ** 2
    term3 = np.abs(zg * (w * m_rd)) ** 2
    return scale * (term1 + term2 + term3) / den


def build_link_model(params, design, geometry, medium, grid=None):
    """Evaluate every gain and noise spectrum of the relay link on one grid."""
    if grid is None:
        grid = grid_for(params)
    f = grid.frequencies
    m_sr = mutual_inductance(design, medium, geometry.dist_source_relay,
                             geometry.polarization_sr, f)
    m_rd = mutual_inductance(design, medium, geometry.dist_relay_dest,
                             geometry.polarization_rd, f)
    g_sr = channel_gain_sr(params, m_sr, m_rd, f)
    g_rr = relay_mapping_gain(params, m_sr, m_rd, f)
    g_rd = channel_gain_rd(params, m_sr, m_rd, f)
    return LinkModel(
        grid=grid,
        gain_sr=Spectrum(grid, g_sr),
        gain_rr=Spectrum(grid, g_rr),
        gain_rd=Spectrum(grid, g_rd),
        gain_sd_passive=Spectrum(
            grid, channel_gain_sd_passive(params, m_sr, m_rd, f)),
        gain_sd_active=Spectrum(grid, g_sr * g_rr * g_rd),
        noise_relay=Spectrum(
            grid, noise_psd_relay(params, m_sr, m_rd, medium.temperature, f)),
        noise_dest=Spectrum(
            grid, noise_psd_dest(params, m_sr, m_rd, medium.temperature, f)),
    )


def build_direct_link(params, design, medium, distance, polarization=2.0,
                      grid=None):
    """Two-coil point-to-point link (relay circuit absent).

    Same circuit equations with a single mutual inductance; the receiver
    noise is the two-resistor-pair analogue of the relay noise density.
    """
    if grid is None:
        grid = grid_for(params)
    f = grid.frequencies
    m = mutual_inductance(design, medium, distance, polarization, f)
    gain = channel_gain_sr(params, m, 0.0, f)
    noise = noise_psd_relay(params, m, 0.0, medium.temperature, f)
    return DirectLinkModel(grid=grid, gain=Spectrum(grid, gain),
                           noise=Spectrum(grid, noise))


def spectrum_to_csv(spectrum, path, value_header="value"):
    """Dump a spectrum as a two-column (frequency, value) CSV file."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frequency_hz", value_header])
        for f, v in zip(spectrum.grid.frequencies, spectrum.values):
            writer.writerow([repr(float(f)), repr(float(v))])
