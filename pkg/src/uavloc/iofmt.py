"""Persistent data formats: measurement logs, result tables, run manifests.

Every CSV has a fixed header, '.' decimal points regardless of locale, floats
at nine significant digits and '\\n' line endings, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

from .estimators import EstimateStatus
from .mission import SweepRow, TrialResult

TOOL_NAME = "uavloc"
TOOL_VERSION = "0.1.0"

MEASUREMENTS_HEADER = [
    "trial", "gd_id", "waypoint_id", "wx", "wy", "wz", "scan_line", "s_measured", "clamped",
]
RESULTS_HEADER = ["trial", "gd_id", "algorithm", "status", "est_x", "est_y", "e_l"]
SWEEP_HEADER = ["axis", "value", "algorithm", "n_ok", "n_total", "mean_e_l", "ci_low", "ci_high"]
BOUNDS_HEADER = ["d", "instrumental", "rolling", "altitude", "combined", "trilateration"]
PATHS_HEADER = ["waypoint_id", "x", "y", "altitude", "scan_line"]


def fmt(x: float) -> str:
    return f"{x:.9g}"


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_measurements_csv(path: Path, results: list[TrialResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = _writer(fh)
        out.writerow(MEASUREMENTS_HEADER)
        for trial in results:
            for m in trial.measurements:
                wp = m.waypoint
                out.writerow(
                    [
                        trial.trial,
                        m.gd_id,
                        wp.id,
                        fmt(wp.position.x),
                        fmt(wp.position.y),
                        fmt(wp.altitude),
                        "" if wp.scan_line is None else wp.scan_line,
                        fmt(m.s_measured),
                        int(m.clamped),
                    ]
                )


def write_results_csv(path: Path, results: list[TrialResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        out = _writer(fh)
        out.writerow(RESULTS_HEADER)
        for trial in results:
            for rec in trial.estimates:
                ok = rec.outcome.status is EstimateStatus.OK
                est = rec.outcome.estimate
                out.writerow(
                    [
                        trial.trial,
                        rec.gd_id,
                        rec.algorithm,
                        rec.outcome.status.value,
                        fmt(est.x) if ok else "",
                        fmt(est.y) if ok else "",
                        fmt(rec.error) if ok else "",
                    ]
                )


def read_results_csv(path: Path) -> list[dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RESULTS_HEADER:
            raise ValueError(
                f"{path}: unexpected results schema {header}; expected {RESULTS_HEADER}"
            )
        return [dict(zip(RESULTS_HEADER, row)) for row in reader]


def sweep_value_str(value) -> str:
    if isinstance(value, tuple):
        return ":".join(fmt(v) for v in value)
    return fmt(value)


def write_sweep_csv(path_or_fh, rows: list[SweepRow]) -> None:
    def emit(fh) -> None:
        out = _writer(fh)
        out.writerow(SWEEP_HEADER)
        for r in rows:
            out.writerow(
                [
                    r.axis,
                    sweep_value_str(r.value),
                    r.algorithm,
                    r.n_ok,
                    r.n_total,
                    fmt(r.mean_error),
                    fmt(r.ci_low),
                    fmt(r.ci_high),
                ]
            )

    if isinstance(path_or_fh, (str, Path)):
        with open(path_or_fh, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(path_or_fh)


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(flat_config: dict[str, str], seed: int, outputs: dict[str, Path]) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "created": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "config": dict(sorted(flat_config.items())),
        "outputs": {name: sha256_file(path) for name, path in sorted(outputs.items())},
    }


def write_manifest(path: Path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
