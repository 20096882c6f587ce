"""Physical-layer primitives: soil, coil electrical parameters, mutual
inductance and circuit impedance of a tuned magnetic-induction transceiver.

All quantities are SI.  The functions are pure and accept numpy arrays for
the frequency argument wherever a frequency appears.
"""

import math
from dataclasses import dataclass

import numpy as np

MU0 = 4e-7 * math.pi            # H/m
EPS0 = 8.8541878128e-12         # F/m
BOLTZMANN = 1.380649e-23        # J/K
COPPER_RESISTIVITY = 1.68e-8    # ohm*m

MAX_WINDINGS = 1000


@dataclass(frozen=True)
class SoilMedium:
    """Homogeneous conductive propagation medium."""

    conductivity: float          # S/m
    relative_permittivity: float
    permeability: float = MU0    # H/m
    temperature: float = 290.0   # K

    def __post_init__(self):
        if self.conductivity < 0:
            raise ValueError("conductivity must be >= 0")
        if self.relative_permittivity < 1:
            raise ValueError("relative_permittivity must be >= 1")
        if self.permeability <= 0:
            raise ValueError("permeability must be > 0")
        if self.temperature <= 0:
            raise ValueError("temperature must be > 0")


@dataclass(frozen=True)
class CoilDesign:
    """Multilayer air-core coil geometry."""

    coil_radius: float   # m
    wire_radius: float   # m
    windings: int
    layers: int = 10

    def __post_init__(self):
        if self.wire_radius <= 0 or self.coil_radius <= self.wire_radius:
            raise ValueError("need coil_radius > wire_radius > 0")
        if not 1 <= self.windings <= MAX_WINDINGS:
            raise ValueError(f"windings must be in [1, {MAX_WINDINGS}]")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")


@dataclass(frozen=True)
class CircuitParams:
    """Electrical parameters of one series-resonant transceiver circuit."""

    inductance: float            # H
    wire_resistance: float       # ohm
    capacitance: float           # F
    load_resistance: float       # ohm
    resonance_frequency: float   # Hz

    def __post_init__(self):
        for name in ("inductance", "wire_resistance", "capacitance",
                     "load_resistance", "resonance_frequency"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        c_res = tuning_capacitance(self.inductance, self.resonance_frequency)
        if abs(self.capacitance - c_res) > 1e-12 * c_res:
            raise ValueError("capacitance violates the resonance condition")


@dataclass(frozen=True)
class RelayGeometry:
    """Source-relay-destination placement and coil-axis polarization."""

    dist_source_relay: float     # m
    dist_relay_dest: float       # m
    polarization_sr: float = 2.0
    polarization_rd: float = 2.0
    min_separation: float = 3.0  # m

    def __post_init__(self):
        if self.dist_source_relay < self.min_separation \
                or self.dist_relay_dest < self.min_separation:
            raise ValueError("relay closer than the minimum separation")


def coil_inductance(design):
    """Inductance of the multilayer air-core coil, Wheeler approximation.

    The winding cross-section is layers deep and windings/layers turns long,
    both measured in wire diameters.
    """
    layers = min(design.layers, design.windings)
    turns_per_layer = math.ceil(design.windings / layers)
    length = 2 * design.wire_radius * turns_per_layer
    depth = 2 * design.wire_radius * layers
    inch = 0.0254
    a, b, c = (design.coil_radius / inch, length / inch, depth / inch)
    l_uh = 0.8 * a * a * design.windings ** 2 / (6 * a + 9 * b + 10 * c)
    return l_uh * 1e-6


def wire_resistance(design, frequency):
    """Series resistance of the coil wire, with a skin-effect correction.

    Above the frequency where the copper skin depth falls below the wire
    radius, conduction is restricted to an annulus one skin depth thick.
    """
    if frequency < 0:
        raise ValueError("frequency must be >= 0")
    length = 2 * math.pi * design.coil_radius * design.windings
    rw = design.wire_radius
    area = math.pi * rw ** 2
    if frequency > 0:
        delta = math.sqrt(COPPER_RESISTIVITY / (math.pi * frequency * MU0))
        if delta < rw:
            area = math.pi * (rw ** 2 - (rw - delta) ** 2)
    return COPPER_RESISTIVITY * length / area


def tuning_capacitance(inductance, resonance_frequency):
    """Series capacitance that tunes the circuit to the carrier."""
    if inductance <= 0 or resonance_frequency <= 0:
        raise ValueError("inductance and resonance_frequency must be > 0")
    return 1.0 / ((2 * math.pi * resonance_frequency) ** 2 * inductance)


def load_resistance(design, frequency):
    """Load resistor matched to the parasitic wire resistance at resonance.

    Matching is done at the decoupled (zero mutual inductance) operating
    point, so the value is independent of the deployment geometry.
    """
    return wire_resistance(design, frequency)


def eddy_loss_factor(medium, distance, frequency):
    """Coupling attenuation due to eddy currents in the conductive medium.

    exp(-r/delta) with the soil skin depth delta = 1/sqrt(pi*f*mu*sigma);
    equals 1 in a lossless medium.
    """
    if distance <= 0:
        raise ValueError("distance must be > 0")
    attenuation = distance * np.sqrt(
        np.pi * np.asarray(frequency, dtype=float)
        * medium.permeability * medium.conductivity)
    g = np.exp(-attenuation)
    return float(g) if np.isscalar(frequency) else g


def mutual_inductance(design, medium, distance, polarization, frequency):
    """Mutual inductance between two coaxial coils through the medium."""
    if distance <= 0:
        raise ValueError("distance must be > 0")
    g = eddy_loss_factor(medium, distance, frequency)
    return (medium.permeability * math.pi * design.windings ** 2
            * design.coil_radius ** 4 / (4 * distance ** 3)
            * polarization * g)


def circuit_impedance(params, frequency):
    """Total series impedance Z of the resonant circuit (complex)."""
    f = np.asarray(frequency, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be > 0")
    w = 2 * np.pi * f
    z = (1j * w * params.inductance + 1.0 / (1j * w * params.capacitance)
         + params.wire_resistance + params.load_resistance)
    return complex(z) if np.isscalar(frequency) else z


def make_circuit(design, resonance_frequency):
    """Assemble the CircuitParams of one transceiver tuned to the carrier."""
    l = coil_inductance(design)
    r = wire_resistance(design, resonance_frequency)
    return CircuitParams(
        inductance=l,
        wire_resistance=r,
        capacitance=tuning_capacitance(l, resonance_frequency),
        load_resistance=load_resistance(design, resonance_frequency),
        resonance_frequency=resonance_frequency,
    )
