"""Shared builders for synthetic measurement logs."""

import math

from uavloc.geometry import GroundPoint, Waypoint
from uavloc.trilateration import RangeMeasurement


def exact_measurement(x, y, target, wp_id, scan_line=None, h=0.0, range_error=0.0):
    """A ranging record with the true distance plus an optional radial error."""
    w = Waypoint(GroundPoint(x, y), h, wp_id, scan_line)
    true_ground = math.hypot(x - target.x, y - target.y)
    slant = math.hypot(true_ground + range_error, h) if h else true_ground + range_error
    return RangeMeasurement.from_slant(w, max(slant, 0.0))


def ring_log(target, radius, bearings_deg, scan_line=None, range_errors=None):
    """Measurements taken from points exactly on a circle around the target."""
    errors = range_errors or [0.0] * len(bearings_deg)
    out = []
    for i, (b, e) in enumerate(zip(bearings_deg, errors)):
        x = target.x + radius * math.cos(math.radians(b))
        y = target.y + radius * math.sin(math.radians(b))
        out.append(exact_measurement(x, y, target, i, scan_line, range_error=e))
    return out


def scan_line_log(target, xs, y_span, i_w, max_range, start_id=0, range_error_fn=None):
    """Vertical-scan measurement log: lines at the given x positions.

    Only waypoints within ``max_range`` of the target are recorded, emulating
    the link gate. Waypoint ids follow path order, scan-line ids index ``xs``.
    """
    records = []
    wp_id = start_id
    y_lo, y_hi = y_span
    for line, x in enumerate(xs):
        ys = []
        y = y_lo
        while y <= y_hi + 1e-9:
            ys.append(y)
            y += i_w
        if line % 2 == 1:
            ys = ys[::-1]
        for y in ys:
            dist = math.hypot(x - target.x, y - target.y)
            if dist <= max_range:
                err = range_error_fn(wp_id) if range_error_fn else 0.0
                records.append(
                    exact_measurement(x, y, target, wp_id, scan_line=line, range_error=err)
                )
            wp_id += 1
    return records
