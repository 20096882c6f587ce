"""Command-line front end: scenario loading, experiment execution and
CSV/plot-data emission.

Verbs:
  evaluate        rate breakdown of one fully specified configuration
  sweep-position  rates versus relay position at a fixed distance
  sweep-distance  full parameter search per distance, best point per row
  optimize        full search at one distance, prints the optimum
  snr-profile     normalized combined-SNR spectra for three relay positions

All computation is deterministic; --seed is accepted for interface
stability but unused.  CSV files use comma separators, '.' decimals, LF
line endings and unit-suffixed headers so reruns are byte-identical.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from .link import build_direct_link, build_link_model, grid_for
from .medium import RelayGeometry, make_circuit
from .optimizer import full_search
from .relaying import SchemeConfig, direct_rate, evaluate
from .scenario import Scenario, load_scenario


def _fmt(x):
    """Canonical cell text: shortest exact float repr, plain strings."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


class OutputSet:
    """Collects files written by one command; removes them all on failure."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.paths = []

    def path(self, name):
        os.makedirs(self.out_dir, exist_ok=True)
        p = os.path.join(self.out_dir, name)
        self.paths.append(p)
        return p

    def write_csv(self, name, header, rows):
        p = self.path(name)
        with open(p, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(c) for c in row])
        return p

    def discard(self):
        for p in self.paths:
            if os.path.exists(p):
                os.remove(p)


def emit_plot_data(curves, out_dir):
    """Write one whitespace-separated data file per curve plus a manifest.

    curves is a list of dicts with keys label, xlabel, ylabel, x, y.
    Returns the list of written paths (manifest last).
    """
    outputs = OutputSet(out_dir)
    manifest = []
    for i, curve in enumerate(curves):
        name = f"curve_{i:02d}_{curve['label'].replace(' ', '_')}.dat"
        p = outputs.path(name)
        with open(p, "w") as fh:
            for x, y in zip(curve["x"], curve["y"]):
                fh.write(f"{_fmt(float(x))} {_fmt(float(y))}\n")
        manifest.append({"file": name, "label": curve["label"],
                         "xlabel": curve["xlabel"], "ylabel": curve["ylabel"]})
    mp = outputs.path("manifest.json")
    with open(mp, "w") as fh:
        json.dump({"curves": manifest}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return outputs.paths


def _scenario(args):
    if args.config:
        return load_scenario(args.config)
    return Scenario()


def _schemes(args, scenario, relayed_only=False):
    if args.scheme:
        names = [args.scheme]
    else:
        names = list(scenario.schemes)
    if relayed_only:
        names = [s for s in names if s != "direct"]
    return names


def _duplexes(args, scenario):
    return [args.duplex] if args.duplex else list(scenario.duplex_modes)


def _rate_at(scenario, distance, scheme, duplex, f0, windings, relay_pos,
             power_split):
    """One configuration, full result object (not just the rate)."""
    dep = scenario.deployment()
    design = dep.coil(windings)
    params = make_circuit(design, f0)
    grid = grid_for(params, count=dep.grid_points,
                    relative_bandwidth=dep.relative_bandwidth)
    if scheme == "direct":
        dl = build_direct_link(params, design, dep.medium, distance,
                               dep.polarization, grid)
        return direct_rate(dl, dep.total_power)
    geometry = RelayGeometry(
        dist_source_relay=relay_pos, dist_relay_dest=distance - relay_pos,
        polarization_sr=dep.polarization, polarization_rd=dep.polarization,
        min_separation=scenario.min_separation)
    link = build_link_model(params, design, geometry, dep.medium, grid)
    config = SchemeConfig(scheme=scheme, duplex=duplex,
                          source_power=power_split * dep.total_power,
                          relay_power=(1 - power_split) * dep.total_power)
    return evaluate(link, config)


def cmd_evaluate(args):
    scenario = _scenario(args)
    distance = args.distance if args.distance else scenario.distances[0]
    print(f"distance {distance} m, f0 {args.f0} Hz, windings {args.windings},"
          f" relay at {args.relay_pos} m, power split {args.power_split}")
    for scheme in _schemes(args, scenario):
        for duplex in _duplexes(args, scenario):
            if scheme == "direct" and duplex == "fd":
                continue
            r = _rate_at(scenario, distance, scheme, duplex, args.f0,
                         args.windings, args.relay_pos, args.power_split)
            extra = ""
            if r.iterations_used:
                extra = (f"  iterations={r.iterations_used}"
                         f" converged={r.converged}")
            print(f"  {scheme:7s} {duplex}: {r.rate:.6e} bit/s{extra}")
    return 0


def cmd_sweep_position(args):
    scenario = _scenario(args)
    distance = args.distance if args.distance else scenario.distances[0]
    positions, _ = scenario.search_space().positions_for(distance)
    if not positions:
        raise ValueError(f"no feasible relay position on a {distance} m link")
    rows = []
    for scheme in _schemes(args, scenario, relayed_only=True):
        for duplex in _duplexes(args, scenario):
            for pos in positions:
                r = _rate_at(scenario, distance, scheme, duplex, args.f0,
                             args.windings, float(pos), args.power_split)
                rows.append([float(pos), scheme, duplex, r.rate])
    outputs = OutputSet(args.out)
    try:
        if args.format == "plotdata":
            curves = []
            for scheme in _schemes(args, scenario, relayed_only=True):
                for duplex in _duplexes(args, scenario):
                    pts = [(p, rt) for p, s, d, rt in rows
                           if s == scheme and d == duplex]
                    curves.append({
                        "label": f"{scheme}-{duplex}",
                        "xlabel": "relay position (m)",
                        "ylabel": "rate (bit/s)",
                        "x": [p for p, _ in pts], "y": [r for _, r in pts]})
            paths = emit_plot_data(curves, args.out)
        else:
            paths = [outputs.write_csv(
                "sweep_position.csv",
                ["position_m", "scheme", "duplex", "rate_bps"], rows)]
    except Exception:
        outputs.discard()
        raise
    for p in paths:
        print(p)
    return 0


def _distance_sweep_rows(scenario, schemes, duplexes, jobs):
    space = scenario.search_space()
    dep = scenario.deployment()
    rows = []
    for distance in scenario.distances:
        for scheme in schemes:
            for duplex in duplexes:
                if scheme == "direct" and duplex == "fd":
                    continue
                opt = full_search(distance, space, dep, scheme,
                                  duplex=duplex, jobs=jobs)
                cfg = opt.best_config
                rows.append([
                    float(distance), scheme, duplex, opt.best_rate,
                    float(cfg["f0_hz"]), cfg["windings"],
                    float(cfg.get("relay_pos_m", float("nan"))),
                    float(cfg.get("power_split", float("nan")))])
    return rows


def cmd_sweep_distance(args):
    scenario = _scenario(args)
    rows = _distance_sweep_rows(scenario, _schemes(args, scenario),
                                _duplexes(args, scenario), args.jobs)
    header = ["distance_m", "scheme", "duplex", "rate_bps", "opt_f0_hz",
              "opt_N", "opt_relay_pos_m", "opt_power_split"]
    outputs = OutputSet(args.out)
    try:
        if args.format == "plotdata":
            curves = []
            seen = []
            for r in rows:
                key = (r[1], r[2])
                if key not in seen:
                    seen.append(key)
            for scheme, duplex in seen:
                pts = [(r[0], r[3]) for r in rows
                       if r[1] == scheme and r[2] == duplex]
                curves.append({
                    "label": f"{scheme}-{duplex}",
                    "xlabel": "distance (m)", "ylabel": "rate (bit/s)",
                    "x": [p for p, _ in pts], "y": [v for _, v in pts]})
            paths = emit_plot_data(curves, args.out)
        else:
            paths = [outputs.write_csv("sweep_distance.csv", header, rows)]
    except Exception:
        outputs.discard()
        raise
    for r in rows:
        print(f"  {r[0]:6.1f} m  {r[1]:7s} {r[2]}  {r[3]:.6e} bit/s  "
              f"f0={r[4]:.4g} Hz  N={r[5]}")
    for p in paths:
        print(p)
    return 0


def cmd_optimize(args):
    scenario = _scenario(args)
    distance = args.distance if args.distance else scenario.distances[0]
    scheme = args.scheme or "df"
    duplex = args.duplex or "hd"
    opt = full_search(distance, scenario.search_space(),
                      scenario.deployment(), scheme, duplex=duplex,
                      jobs=args.jobs)
    print(f"best rate {opt.best_rate:.6e} bit/s at {opt.best_config}")
    if opt.skipped_positions:
        print(f"skipped infeasible positions: {opt.skipped_positions}")
    outputs = OutputSet(args.out)
    try:
        header = ["f0_hz", "windings", "relay_pos_m", "power_split",
                  "rate_bps"]
        rows = [[float(r["f0_hz"]), r["windings"],
                 float(r.get("relay_pos_m", float("nan"))),
                 float(r.get("power_split", float("nan"))), r["rate_bps"]]
                for r in opt.rate_surface]
        print(outputs.write_csv(f"surface_{scheme}_{duplex}.csv", header,
                                rows))
    except Exception:
        outputs.discard()
        raise
    return 0


def cmd_snr_profile(args):
    scenario = _scenario(args)
    distance = args.distance if args.distance else scenario.distances[0]
    scheme = args.scheme or "af"
    if scheme == "direct":
        raise ValueError("snr-profile needs a relayed scheme")
    lo = scenario.min_separation
    hi = distance - scenario.min_separation
    if hi < lo:
        raise ValueError(f"no feasible relay position on a {distance} m link")
    positions = [lo, (lo + hi) / 2, hi]
    curves = []
    for pos in positions:
        r = _rate_at(scenario, distance, scheme, "hd", args.f0,
                     args.windings, pos, args.power_split)
        snr = np.asarray(r.snr.values, dtype=float)
        peak = np.max(snr)
        if peak > 0:
            snr = snr / peak
        curves.append({
            "label": f"{scheme} relay at {pos:g} m",
            "xlabel": "frequency (Hz)", "ylabel": "normalized SNR",
            "x": list(r.snr.grid.frequencies), "y": list(snr)})
    if args.format == "csv":
        outputs = OutputSet(args.out)
        rows = []
        for pos, curve in zip(positions, curves):
            for x, y in zip(curve["x"], curve["y"]):
                rows.append([float(pos), float(x), float(y)])
        try:
            paths = [outputs.write_csv(
                "snr_profile.csv",
                ["position_m", "frequency_hz", "normalized_snr"], rows)]
        except Exception:
            outputs.discard()
            raise
    else:
        paths = emit_plot_data(curves, args.out)
    for p in paths:
        print(p)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mirelay",
        description="Rate simulation of relayed magnetic-induction links")
    parser.add_argument("--config", help="scenario YAML file")
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--scheme", choices=["direct", "af", "ff", "df"])
    parser.add_argument("--duplex", choices=["hd", "fd"])
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0,
                        help="reserved; all computation is deterministic")
    parser.add_argument("--format", choices=["csv", "plotdata"],
                        default="csv")
    sub = parser.add_subparsers(dest="command", required=True)

    def point_flags(p):
        p.add_argument("--distance", type=float)
        p.add_argument("--f0", type=float, default=1e6)
        p.add_argument("--windings", type=int, default=1000)
        p.add_argument("--relay-pos", type=float, default=10.0)
        p.add_argument("--power-split", type=float, default=0.5)

    p = sub.add_parser("evaluate", help="rate of one configuration")
    point_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep-position", help="rates vs relay position")
    point_flags(p)
    p.set_defaults(func=cmd_sweep_position)

    p = sub.add_parser("sweep-distance", help="full search per distance")
    p.set_defaults(func=cmd_sweep_distance)

    p = sub.add_parser("optimize", help="full search at one distance")
    p.add_argument("--distance", type=float)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("snr-profile", help="normalized SNR spectra")
    point_flags(p)
    p.set_defaults(func=cmd_snr_profile)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
