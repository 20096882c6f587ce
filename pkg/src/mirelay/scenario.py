"""Scenario files: everything one study needs, serializable to YAML.

A scenario bundles the medium, the coil construction limits, the power
budget and the search grids, with defaults matching a wet-soil deployment
(0.01 S/m, relative permittivity 7) of 0.15 m coils wound from 0.5 mm
wire, 10 mW total transmit power and a 3 m minimum coil separation.
"""

from dataclasses import asdict, dataclass, field

import yaml

from .medium import MU0, SoilMedium
from .optimizer import (DEFAULT_POWER_SPLITS, DEFAULT_WINDINGS, Deployment,
                        SearchSpace, log_frequency_grid)

@dataclass(frozen=True)
class Scenario:
    """One self-contained study configuration."""

    name: str = "default"
    conductivity: float = 0.01          # S/m
    relative_permittivity: float = 7.0
    permeability: float = MU0           # H/m
    temperature: float = 290.0          # K
    coil_radius: float = 0.15           # m
    wire_radius: float = 5e-4           # m
    layers: int = 10
    polarization: float = 2.0
    total_power: float = 10e-3          # W
    min_separation: float = 3.0         # m
    grid_points: int = 513
    relative_bandwidth: float = 0.5
    f0_lo: float = 1e3                  # Hz
    f0_hi: float = 30e6                 # Hz
    f0_points_per_decade: int = 20
    windings_grid: tuple = DEFAULT_WINDINGS
    power_splits: tuple = DEFAULT_POWER_SPLITS
    distances: tuple = (10.0, 20.0, 30.0, 40.0, 50.0)
    schemes: tuple = ("direct", "af", "ff", "df")
    duplex_modes: tuple = ("hd",)
    output_dir: str = "results"

    def __post_init__(self):
        if self.conductivity <= 0 or self.relative_permittivity <= 0:
            raise ValueError("medium parameters must be > 0")
        if self.total_power <= 0:
            raise ValueError("total_power must be > 0")
        if self.f0_lo <= 0 or self.f0_hi <= self.f0_lo:
            raise ValueError("need 0 < f0_lo < f0_hi")
        if not self.distances:
            raise ValueError("distances must be non-empty")
        for name in ("windings_grid", "power_splits", "distances", "schemes",
                     "duplex_modes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        bad = [s for s in self.schemes
               if s not in ("direct", "af", "ff", "df")]
        if bad:
            raise ValueError(f"unknown schemes {bad}")
        bad = [d for d in self.duplex_modes if d not in ("hd", "fd")]
        if bad:
            raise ValueError(f"unknown duplex modes {bad}")

    def medium(self):
        return SoilMedium(conductivity=self.conductivity,
                          relative_permittivity=self.relative_permittivity,
                          permeability=self.permeability,
                          temperature=self.temperature)

    def deployment(self):
        return Deployment(medium=self.medium(),
                          coil_radius=self.coil_radius,
                          wire_radius=self.wire_radius,
                          layers=self.layers,
                          polarization=self.polarization,
                          total_power=self.total_power,
                          grid_points=self.grid_points,
                          relative_bandwidth=self.relative_bandwidth)

    def search_space(self):
        f0 = log_frequency_grid(self.f0_lo, self.f0_hi,
                                self.f0_points_per_decade)
        return SearchSpace(f0_grid=tuple(f0),
                           windings_grid=self.windings_grid,
                           power_splits=self.power_splits,
                           min_separation=self.min_separation)

    def to_dict(self):
        d = asdict(self)
        for name in ("windings_grid", "power_splits", "distances", "schemes",
                     "duplex_modes"):
            d[name] = list(getattr(self, name))
        return d

    def save(self, path):
        with open(path, "w") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=False)


def load_scenario(path):
    """Parse a scenario YAML file, naming whatever is malformed."""
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: scenario file must be a YAML mapping")
    known = set(Scenario.__dataclass_fields__)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"{path}: unknown scenario fields {unknown}")
    try:
        return Scenario(**raw)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: {exc}") from exc
