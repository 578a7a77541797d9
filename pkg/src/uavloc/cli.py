"""Command-line interface: bounds | simulate | compare | paths."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .config import ConfigError, RunSpec, load_config, spec_to_flat
from .errors import AccuracyProfile, bound_combined
from .iofmt import (
    BOUNDS_HEADER,
    PATHS_HEADER,
    build_manifest,
    fmt,
    read_results_csv,
    write_manifest,
    write_measurements_csv,
    write_results_csv,
    write_sweep_csv,
)
from .mission import SweepRow, generate_scan_path, mean_ci, run_mission, sweep
from .trilateration import trilateration_accuracy


def _parse_d_range(raw: str) -> list[float]:
    """A single distance or an inclusive start:stop:step range."""
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ValueError(f"distance range must be start:stop:step, got {raw!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad distance range {raw!r}")
        values = []
        v = start
        while v <= stop + 1e-9:
            values.append(round(v, 9))
            v += step
        return values
    return [float(raw)]


def _cmd_bounds(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    try:
        distances = _parse_d_range(args.d)
    except ValueError as exc:
        parser.error(str(exc))
    if any(d <= 0 for d in distances):
        parser.error("ground distance must be > 0 (the bound diverges overhead)")
    if not 0 < args.beta_min <= 60.0 + 1e-9:
        parser.error("--beta-min must lie in (0, 60] degrees")
    if args.h < 0 or args.eps_s < 0 or args.gamma_d < 0 or args.gamma_h < 0:
        parser.error("accuracies and altitude must be >= 0")

    profile = AccuracyProfile(args.eps_s, args.gamma_d, args.gamma_h)
    beta = math.radians(args.beta_min)
    lines = [",".join(BOUNDS_HEADER)]
    for d in distances:
        b = bound_combined(profile, args.h, d)
        tri = trilateration_accuracy(profile, args.h, d, beta)
        lines.append(
            ",".join(
                [fmt(d), fmt(b.instrumental), fmt(b.rolling), fmt(b.altitude), fmt(b.combined), fmt(tri)]
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        overrides[key.strip()] = value.strip()
    if getattr(args, "seed", None) is not None:
        overrides["mission.seed"] = str(args.seed)
    if getattr(args, "trials", None) is not None:
        overrides["mission.trials"] = str(args.trials)
    return overrides


def _load_spec(args: argparse.Namespace) -> RunSpec:
    return load_config(args.config, _overrides(args))


def _cmd_simulate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = _load_spec(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = run_mission(spec.mission, spec.deployment, spec.algorithms, workers=args.workers)

    measurements_path = out_dir / "measurements.csv"
    results_path = out_dir / "results.csv"
    write_measurements_csv(measurements_path, results)
    write_results_csv(results_path, results)
    manifest = build_manifest(
        spec_to_flat(spec),
        spec.mission.seed,
        {"measurements.csv": measurements_path, "results.csv": results_path},
    )
    write_manifest(out_dir / "manifest.json", manifest)
    print(f"wrote {measurements_path}, {results_path}, {out_dir / 'manifest.json'}")
    return 0


def _parse_axis_values(axis: str, raw: str) -> list:
    values = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if axis == "h_over_d":
            h, sep, d = chunk.partition(":")
            if not sep:
                raise ValueError(f"h_over_d values must look like h:d, got {chunk!r}")
            values.append((float(h), float(d)))
        elif axis == "beta":
            values.append(math.radians(float(chunk)))
        else:
            values.append(float(chunk))
    if not values:
        raise ValueError("no axis values given")
    return values


def _compare_results_files(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    labels = [s.strip() for s in (args.labels or "").split(",") if s.strip()]
    if len(labels) != len(args.results):
        parser.error("--labels must provide one numeric label per results file")
    try:
        numeric = [float(s) for s in labels]
    except ValueError:
        parser.error("--labels must be numeric axis values")
    rows: list[SweepRow] = []
    for label, path in zip(numeric, args.results):
        records = read_results_csv(Path(path))
        if not records:
            raise ValueError(f"{path}: no result rows")
        by_alg: dict[str, list[float]] = {}
        totals: dict[str, int] = {}
        for rec in records:
            totals[rec["algorithm"]] = totals.get(rec["algorithm"], 0) + 1
            if rec["status"] == "ok" and rec["e_l"]:
                by_alg.setdefault(rec["algorithm"], []).append(float(rec["e_l"]))
        for alg in sorted(totals):
            mean, lo, hi = mean_ci(by_alg.get(alg, []))
            rows.append(
                SweepRow("label", label, alg, len(by_alg.get(alg, [])), totals[alg], mean, lo, hi)
            )
    _emit_sweep(rows, args.out)
    return 0


def _emit_sweep(rows: list[SweepRow], out: str | None) -> None:
    if out:
        write_sweep_csv(Path(out), rows)
    else:
        write_sweep_csv(sys.stdout, rows)


def _cmd_compare(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.results:
        return _compare_results_files(args, parser)
    if not args.config or not args.axis or not args.values:
        parser.error("compare needs either --results files or --config/--axis/--values")
    spec = _load_spec(args)
    try:
        values = _parse_axis_values(args.axis, args.values)
    except ValueError as exc:
        parser.error(str(exc))
    rows = sweep(
        spec.mission,
        spec.deployment,
        args.axis,
        values,
        spec.algorithms,
        field_fit=args.field_fit,
        workers=args.workers,
    )
    _emit_sweep(rows, args.out)
    return 0


def _cmd_paths(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = _load_spec(args)
    waypoints = generate_scan_path(spec.mission)
    lines = [",".join(PATHS_HEADER)]
    for w in waypoints:
        scan = "" if w.scan_line is None else str(w.scan_line)
        lines.append(f"{w.id},{fmt(w.position.x)},{fmt(w.position.y)},{fmt(w.altitude)},{scan}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavloc",
        description="Drone-anchor range localization: error bounds, simulation, and comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="print the ground and trilateration error bounds")
    p_bounds.add_argument("--eps-s", type=float, default=0.0, help="ranging accuracy, m")
    p_bounds.add_argument("--gamma-d", type=float, default=0.0, help="horizontal drift accuracy, m")
    p_bounds.add_argument("--gamma-h", type=float, default=0.0, help="vertical drift accuracy, m")
    p_bounds.add_argument("--h", type=float, required=True, help="flight altitude, m")
    p_bounds.add_argument("--d", type=str, required=True, help="ground distance, m (or start:stop:step)")
    p_bounds.add_argument("--beta-min", type=float, default=60.0, help="minimum anchor angle, degrees")
    p_bounds.add_argument("--out", type=str, default=None, help="write CSV here instead of stdout")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="mission config file")
    common.add_argument("--seed", type=int, default=None, help="override the mission seed")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="override one config value (repeatable)")

    p_sim = sub.add_parser("simulate", parents=[common], help="run a mission and write its logs")
    p_sim.add_argument("--out-dir", type=str, default=".", help="output directory")
    p_sim.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    p_sim.add_argument("--trials", type=int, default=None, help="override the trial count")

    p_cmp = sub.add_parser("compare", parents=[common],
                           help="aggregate localization errors into plot-ready rows")
    p_cmp.add_argument("--axis", choices=("d", "beta", "h", "h_over_d"), help="sweep axis")
    p_cmp.add_argument("--values", type=str,
                       help="comma-separated axis values (beta in degrees, h_over_d as h:d)")
    p_cmp.add_argument("--trials", type=int, default=None, help="override the trial count")
    p_cmp.add_argument("--field-fit", action="store_true",
                       help="use the altitude-fitted accuracy preset per cell")
    p_cmp.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    p_cmp.add_argument("--results", nargs="*", default=None, help="existing results.csv files")
    p_cmp.add_argument("--labels", type=str, default=None, help="axis value per results file")
    p_cmp.add_argument("--out", type=str, default=None, help="write CSV here instead of stdout")

    p_paths = sub.add_parser("paths", parents=[common], help="print the broadcast waypoint list")
    p_paths.add_argument("--out", type=str, default=None, help="write CSV here instead of stdout")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "bounds": _cmd_bounds,
        "simulate": _cmd_simulate,
        "compare": _cmd_compare,
        "paths": _cmd_paths,
    }
    if args.command != "bounds" and getattr(args, "config", None) is None and not getattr(args, "results", None):
        parser.error("--config is required")
    try:
        return handlers[args.command](args, parser)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
