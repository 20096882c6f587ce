"""Deterministic full search over resonance frequency, winding count,
relay position and source/relay power split.

Every grid point is evaluated through the pure rate engines; the reduction
keeps the first-seen maximum, so ties resolve to the lowest resonance
frequency, then the fewest windings, then the leftmost relay position and
smallest power split.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .link import build_direct_link, build_link_model, grid_for
from .medium import CoilDesign, RelayGeometry, SoilMedium, make_circuit
from .relaying import SchemeConfig, direct_rate, evaluate

DEFAULT_F0_RANGE = (1e3, 30e6)
DEFAULT_F0_POINTS_PER_DECADE = 20
DEFAULT_WINDINGS = (10, 50, 100, 200, 500, 1000)
DEFAULT_RELAY_POSITIONS = 9
DEFAULT_POWER_SPLITS = tuple(round(0.1 * i, 1) for i in range(11))


def log_frequency_grid(lo=DEFAULT_F0_RANGE[0], hi=DEFAULT_F0_RANGE[1],
                       points_per_decade=DEFAULT_F0_POINTS_PER_DECADE):
    """Logarithmically spaced carrier candidates, endpoints included."""
    n = int(round(math.log10(hi / lo) * points_per_decade)) + 1
    return list(np.geomspace(lo, hi, n))


@dataclass(frozen=True)
class SearchSpace:
    """Grids of the jointly searched system parameters.

    relay_positions is a list of distances from the source in meters, or
    None to place the default number of evenly spaced feasible points for
    the link distance at hand.
    """

    f0_grid: tuple = field(default_factory=lambda: tuple(log_frequency_grid()))
    windings_grid: tuple = DEFAULT_WINDINGS
    relay_positions: tuple | None = None
    power_splits: tuple = DEFAULT_POWER_SPLITS
    min_separation: float = 3.0

    def __post_init__(self):
        if not self.f0_grid or not self.windings_grid or not self.power_splits:
            raise ValueError("search grids must be non-empty")
        if any(n > 1000 for n in self.windings_grid):
            raise ValueError("windings grid exceeds the 1000-turn maximum")
        if any(not 0 <= s <= 1 for s in self.power_splits):
            raise ValueError("power splits must lie in [0, 1]")

    def positions_for(self, distance):
        """Feasible relay positions plus the infeasible ones dropped."""
        if self.relay_positions is None:
            lo, hi = self.min_separation, distance - self.min_separation
            if hi < lo:
                return [], []
            candidates = list(np.linspace(lo, hi, DEFAULT_RELAY_POSITIONS))
        else:
            candidates = list(self.relay_positions)
        feasible = [p for p in candidates
                    if self.min_separation <= p <= distance - self.min_separation]
        skipped = [p for p in candidates if p not in feasible]
        return feasible, skipped


@dataclass(frozen=True)
class Deployment:
    """Everything the search needs besides the searched parameters."""

    medium: SoilMedium
    coil_radius: float = 0.15
    wire_radius: float = 5e-4
    layers: int = 10
    polarization: float = 2.0
    total_power: float = 10e-3
    grid_points: int = 513
    relative_bandwidth: float = 0.5
    max_iterations: int = 100
    convergence_tol: float = 1e-6

    def coil(self, windings):
        return CoilDesign(coil_radius=self.coil_radius,
                          wire_radius=self.wire_radius,
                          windings=windings, layers=self.layers)


@dataclass(frozen=True)
class Optimum:
    """Best grid point of one full search, with the complete rate surface."""

    best_config: dict
    best_rate: float
    rate_surface: list          # one dict per evaluated grid point
    skipped_positions: list

    def __post_init__(self):
        if self.rate_surface:
            assert self.best_rate == max(r["rate_bps"] for r in self.rate_surface)


def evaluate_point(distance, deployment, scheme, duplex, f0, windings,
                   relay_pos=None, power_split=None):
    """Rate of one fully specified parameter set (pure, deterministic)."""
    design = deployment.coil(windings)
    params = make_circuit(design, f0)
    grid = grid_for(params, count=deployment.grid_points,
                    relative_bandwidth=deployment.relative_bandwidth)
    if scheme == "direct":
        dl = build_direct_link(params, design, deployment.medium, distance,
                               deployment.polarization, grid)
        return direct_rate(dl, deployment.total_power).rate
    # feasibility w.r.t. the minimum separation is the search space's job
    geometry = RelayGeometry(
        dist_source_relay=relay_pos, dist_relay_dest=distance - relay_pos,
        polarization_sr=deployment.polarization,
        polarization_rd=deployment.polarization, min_separation=0.0)
    link = build_link_model(params, design, geometry, deployment.medium, grid)
    source_power = power_split * deployment.total_power
    config = SchemeConfig(
        scheme=scheme, duplex=duplex,
        source_power=source_power,
        relay_power=deployment.total_power - source_power,
        max_iterations=deployment.max_iterations,
        convergence_tol=deployment.convergence_tol)
    return evaluate(link, config).rate


def _grid_points(distance, space, scheme):
    feasible, skipped = space.positions_for(distance)
    points = []
    if scheme == "direct":
        for f0 in space.f0_grid:
            for n in space.windings_grid:
                points.append((f0, n, None, None))
        return points, []
    if not feasible:
        raise ValueError(
            f"no feasible relay position for a {distance} m link with "
            f"minimum separation {space.min_separation} m")
    for f0 in space.f0_grid:
        for n in space.windings_grid:
            for pos in feasible:
                for split in space.power_splits:
                    points.append((f0, n, pos, split))
    return points, skipped


def _eval_star(args):
    return evaluate_point(*args)


def full_search(distance, space, deployment, scheme, duplex="hd", jobs=1):
    """Exhaustive deterministic search over the whole parameter grid."""
    points, skipped = _grid_points(distance, space, scheme)
    tasks = [(distance, deployment, scheme, duplex) + p for p in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rates = list(pool.map(_eval_star, tasks, chunksize=32))
    else:
        rates = [_eval_star(t) for t in tasks]

    surface = []
    best_idx = 0
    for i, ((f0, n, pos, split), rate) in enumerate(zip(points, rates)):
        row = {"f0_hz": f0, "windings": n, "rate_bps": rate}
        if pos is not None:
            row["relay_pos_m"] = pos
            row["power_split"] = split
        surface.append(row)
        if rate > rates[best_idx]:
            best_idx = i
    f0, n, pos, split = points[best_idx]
    best = {"distance_m": distance, "scheme": scheme, "duplex": duplex,
            "f0_hz": f0, "windings": n}
    if pos is not None:
        best["relay_pos_m"] = pos
        best["power_split"] = split
    return Optimum(best_config=best, best_rate=rates[best_idx],
                   rate_surface=surface, skipped_positions=skipped)


def sweep_distance(distances, space, deployment, scheme, duplex="hd", jobs=1):
    """One full search per distance, in input order."""
    return [full_search(d, space, deployment, scheme, duplex, jobs=jobs)
            for d in distances]
