"""The six localization algorithms a ground device can run on its ranging log.

Two are trilateration based (scan, omni), one intersects two range circles
(drbc), and three reuse classic anchor-geometry constructions driven by range
measurements instead of heard/not-heard events (drf, ioc, ioa).

Every estimator is a pure function of (measurements, constraints) returning an
:class:`EstimateOutcome`. Geometric degeneracies caused by noise are repaired
with deterministic fallbacks wherever the construction allows it, so mission
statistics stay total; repairs and degraded geometry are recorded as notes on
the outcome. All tie-breaking is by waypoint id, which makes every algorithm
deterministic for a fixed input log.
"""

from __future__ import annotations

import enum
import itertools
import math
import statistics
from dataclasses import dataclass

import numpy as np

from .geometry import GroundPoint, anchors_collinear, beta_angles
from .trilateration import (
    CollinearAnchorsError,
    RangeMeasurement,
    trilaterate,
)

# Bound on how many nearest-to-target measurements a relaxed selection may
# enumerate triples over; keeps the combinatorics flat on dense logs.
_RELAXED_POOL_CAP = 40

_CHORD_EPS = 1e-6  # chords shorter than this cannot define a bisector
_TIE_EPS = 1e-9


class NoValidTripleError(ValueError):
    """No measurement triple satisfies the selection constraints."""


class EstimateStatus(enum.Enum):
    OK = "ok"
    NO_VALID_TRIPLE = "no-valid-triple"
    AMBIGUOUS = "ambiguous"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class SelectionConstraints:
    """Waypoint-selection rules shared by the estimators.

    ``target_d`` is the wanted ground distance of the anchors, ``tolerance``
    the half-width of the accepted window around it, ``min_beta`` the minimum
    line angle the anchor triple must subtend at the (coarse) position
    estimate, and ``d_min`` the smallest usable ground distance.
    ``inter_waypoint`` is the broadcast spacing along the path; if unset it is
    inferred from the log. ``region_grid`` is the cell size used for the
    area-centroid estimators.
    """

    target_d: float
    tolerance: float = 1.0
    min_beta: float = 0.0
    d_min: float = 0.0
    inter_waypoint: float | None = None
    region_grid: float = 0.01

    def __post_init__(self) -> None:
        if self.tolerance < 0:
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance}")
        if not 0 <= self.min_beta <= math.pi / 3 + 1e-12:
            raise ValueError(f"min_beta must lie in [0, pi/3], got {self.min_beta}")
        if self.region_grid <= 0:
            raise ValueError(f"region_grid must be > 0, got {self.region_grid}")


@dataclass(frozen=True)
class EstimateOutcome:
    """Result of one estimator run; ``estimate`` is present iff status is ok."""

    estimate: GroundPoint | None
    status: EstimateStatus
    used_waypoints: tuple[int, ...] = ()
    notes: tuple[str, ...] = ()
    region_diameter: float | None = None

    def __post_init__(self) -> None:
        if (self.estimate is None) == (self.status is EstimateStatus.OK):
            raise ValueError("estimate must be present exactly when status is ok")


def _failure(status: EstimateStatus, *notes: str) -> EstimateOutcome:
    return EstimateOutcome(None, status, (), tuple(notes))


def _usable(measurements: list[RangeMeasurement]) -> list[RangeMeasurement]:
    """Drop clamped records and return the rest in waypoint-id order."""
    return sorted((m for m in measurements if not m.clamped), key=lambda m: m.waypoint.id)


def _pos(m: RangeMeasurement) -> GroundPoint:
    return m.waypoint.position


def _ids(trio) -> tuple[int, ...]:
    return tuple(m.waypoint.id for m in trio)


def _in_window(m: RangeMeasurement, c: SelectionConstraints) -> bool:
    return abs(m.projected_ground - c.target_d) <= c.tolerance


def _nearest_to_target(
    pool: list[RangeMeasurement], c: SelectionConstraints, cap: int = _RELAXED_POOL_CAP
) -> list[RangeMeasurement]:
    ranked = sorted(pool, key=lambda m: (abs(m.projected_ground - c.target_d), m.waypoint.id))
    return sorted(ranked[:cap], key=lambda m: m.waypoint.id)


def _beta_min_at(reference: GroundPoint, trio) -> float:
    try:
        return beta_angles(reference, *(_pos(m) for m in trio)).beta_min
    except ValueError:
        return 0.0


def select_triple(
    measurements: list[RangeMeasurement],
    c: SelectionConstraints,
    reference: GroundPoint,
) -> tuple[RangeMeasurement, RangeMeasurement, RangeMeasurement]:
    """Pick the constrained anchor triple for a device near ``reference``.

    Candidates must project into the distance window, keep at least ``d_min``
    of ground distance, subtend at least ``min_beta`` at the reference, and be
    non-collinear. Among candidates the triple with the largest minimum angle
    wins, ties broken by earliest waypoint ids.
    """
    if not measurements:
        raise NoValidTripleError("empty measurement list")
    pool = [m for m in _usable(measurements) if _in_window(m, c) and m.projected_ground >= c.d_min]
    best_key = None
    best_trio = None
    for trio in itertools.combinations(pool, 3):
        pts = [_pos(m) for m in trio]
        if anchors_collinear(*pts):
            continue
        bmin = _beta_min_at(reference, trio)
        if bmin <= 0 or bmin + 1e-12 < c.min_beta:
            continue
        key = (-bmin, _ids(trio))
        if best_key is None or key < best_key:
            best_key, best_trio = key, trio
    if best_trio is None:
        raise NoValidTripleError("no non-collinear triple satisfies the selection constraints")
    return best_trio


def _spread_triple(
    pool: list[RangeMeasurement], require_two_lines: bool = False
) -> tuple[RangeMeasurement, RangeMeasurement, RangeMeasurement] | None:
    """Greedy farthest-point triple used as the coarse (first-pass) anchors.

    Spread anchors keep the coarse fix well conditioned without knowing the
    device position yet. Returns None when no acceptable triple exists.
    """
    if len(pool) < 3:
        return None
    a = pool[0]
    b = max(pool[1:], key=lambda m: (_pos(a).distance_to(_pos(m)), -m.waypoint.id))
    if _pos(a).distance_to(_pos(b)) == 0.0:
        return None

    def third_candidates() -> list[RangeMeasurement]:
        rest = [m for m in pool if m is not a and m is not b]
        if require_two_lines and a.waypoint.scan_line == b.waypoint.scan_line:
            rest = [m for m in rest if m.waypoint.scan_line != a.waypoint.scan_line]
        return rest

    def min_dist(m: RangeMeasurement) -> float:
        return min(_pos(a).distance_to(_pos(m)), _pos(b).distance_to(_pos(m)))

    candidates = sorted(third_candidates(), key=lambda m: (-min_dist(m), m.waypoint.id))
    for third in candidates:
        trio = tuple(sorted((a, b, third), key=lambda m: m.waypoint.id))
        if anchors_collinear(*(_pos(m) for m in trio)):
            continue
        if require_two_lines and len({m.waypoint.scan_line for m in trio}) < 2:
            continue
        return trio  # type: ignore[return-value]
    return None


def _spans_two_lines(trio) -> bool:
    return len({m.waypoint.scan_line for m in trio}) >= 2


def _first_qualifying(
    pool: list[RangeMeasurement],
    c: SelectionConstraints,
    reference: GroundPoint,
    need_two_lines: bool,
):
    for trio in itertools.combinations(pool, 3):
        if need_two_lines and not _spans_two_lines(trio):
            continue
        pts = [_pos(m) for m in trio]
        if anchors_collinear(*pts):
            continue
        if _beta_min_at(reference, trio) + 1e-12 < c.min_beta:
            continue
        return trio
    return None


def _best_beta_triple(
    pool: list[RangeMeasurement], reference: GroundPoint, need_two_lines: bool
):
    best_key = None
    best_trio = None
    for trio in itertools.combinations(pool, 3):
        if need_two_lines and not _spans_two_lines(trio):
            continue
        pts = [_pos(m) for m in trio]
        if anchors_collinear(*pts):
            continue
        bmin = _beta_min_at(reference, trio)
        if bmin <= 0:
            continue
        key = (-bmin, _ids(trio))
        if best_key is None or key < best_key:
            best_key, best_trio = key, trio
    return best_trio


def estimate_scan(measurements: list[RangeMeasurement], c: SelectionConstraints) -> EstimateOutcome:
    """Single trilateration on anchors drawn from at least two scan lines.

    A coarse fix on a spread triple provides the reference point for the
    angle constraint; the final anchors are the first id-ordered window triple
    that satisfies the constraints. When none does, the best-geometry triple
    available is used instead and the outcome is marked degraded.
    """
    pool = [m for m in _usable(measurements) if m.waypoint.scan_line is not None]
    if len(pool) < 3 or len({m.waypoint.scan_line for m in pool}) < 2:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "fewer-than-two-scan-lines")
    coarse_trio = _spread_triple(pool, require_two_lines=True)
    if coarse_trio is None:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "all-triples-collinear")
    coarse = trilaterate(*coarse_trio)

    window = [m for m in pool if _in_window(m, c)]
    notes: list[str] = []
    chosen = _first_qualifying(window, c, coarse.estimate, need_two_lines=True)
    if chosen is None:
        chosen = _best_beta_triple(window, coarse.estimate, need_two_lines=True)
        if chosen is None:
            relaxed = _nearest_to_target(pool, c)
            chosen = _best_beta_triple(relaxed, coarse.estimate, need_two_lines=True)
        if chosen is None:
            return _failure(EstimateStatus.NO_VALID_TRIPLE, "all-triples-collinear")
        notes.append("degraded-geometry")

    result = trilaterate(*chosen, initial_guess=coarse.estimate)
    if not result.converged:
        notes.append("non-converged")
    return EstimateOutcome(result.estimate, EstimateStatus.OK, _ids(chosen), tuple(notes))


def _max_beta_triple_fast(
    cands: list[RangeMeasurement], reference: GroundPoint
):
    """Near-optimal max-min-angle triple at ``reference``.

    Anchors the search on each candidate's line orientation and pairs it with
    the measurements closest to +60 and +120 degrees away (mod pi), which is
    where the minimum angle of a triple peaks. Every proposed triple is then
    scored exactly.
    """
    n = len(cands)
    if n < 3:
        return None
    xs = np.asarray([_pos(m).x for m in cands])
    ys = np.asarray([_pos(m).y for m in cands])
    dx, dy = xs - reference.x, ys - reference.y
    if np.any((dx == 0) & (dy == 0)):
        keep = ~((dx == 0) & (dy == 0))
        return _max_beta_triple_fast([m for m, k in zip(cands, keep) if k], reference)
    phis = np.arctan2(dy, dx) % math.pi
    order = np.argsort(phis, kind="stable")
    sorted_phis = phis[order]

    def nearest(target: float) -> list[int]:
        t = target % math.pi
        j = int(np.searchsorted(sorted_phis, t))
        picks = {(j - 1) % n, j % n}
        return [int(order[k]) for k in picks]

    proposals: set[tuple[int, int, int]] = set()
    for i in range(n):
        for off in (math.pi / 3.0, 2.0 * math.pi / 3.0):
            for j in nearest(phis[i] + off):
                for k in nearest(phis[i] + (math.pi - off)):
                    trio = tuple(sorted((i, j, k)))
                    if len(set(trio)) == 3:
                        proposals.add(trio)  # type: ignore[arg-type]
    if not proposals:
        return None

    trip = np.asarray(sorted(proposals))
    p = np.sort(phis[trip], axis=1)
    gaps = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], math.pi - (p[:, 2] - p[:, 0])])
    bmin = gaps.min(axis=0)

    best_key = None
    best = None
    threshold = float(bmin.max()) - _TIE_EPS
    for row in np.flatnonzero(bmin >= threshold):
        trio = tuple(cands[i] for i in trip[row])
        if anchors_collinear(*(_pos(m) for m in trio)):
            continue
        min_proj = min(m.projected_ground for m in trio)
        key = (-float(bmin[row]), -min_proj, _ids(trio))
        if best_key is None or key < best_key:
            best_key, best = key, trio
    if best is not None:
        return best
    # Every near-optimal proposal had collinear anchors; fall back to the
    # exact scorer on a bounded pool.
    return None


def estimate_omni(measurements: list[RangeMeasurement], c: SelectionConstraints) -> EstimateOutcome:
    """Two-pass trilateration: coarse fix, then optimal-geometry anchors.

    The second pass maximizes the minimum anchor-line angle at the coarse fix
    over all measurements at ground distance >= d_min, which is the behavioral
    contract of the diamond-table selection without its precomputed tables.
    """
    pool = _usable(measurements)
    if len(pool) < 3:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "fewer-than-three-measurements")
    coarse_trio = _spread_triple(pool)
    if coarse_trio is None:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "all-triples-collinear")
    coarse = trilaterate(*coarse_trio)

    notes: list[str] = []
    cands = [m for m in pool if m.projected_ground >= c.d_min]
    if len(cands) < 3:
        cands = pool
        notes.append("d-min-relaxed")
    chosen = _max_beta_triple_fast(cands, coarse.estimate)
    if chosen is None:
        chosen = _best_beta_triple(_nearest_to_target(cands, c), coarse.estimate, False)
    if chosen is None:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "all-triples-collinear")
    if _beta_min_at(coarse.estimate, chosen) + 1e-12 < c.min_beta:
        notes.append("degraded-geometry")

    result = trilaterate(*chosen, initial_guess=coarse.estimate)
    if not result.converged:
        notes.append("non-converged")
    return EstimateOutcome(result.estimate, EstimateStatus.OK, _ids(chosen), tuple(notes))


def _circle_intersections(
    a: GroundPoint, ra: float, b: GroundPoint, rb: float
) -> tuple[GroundPoint, ...]:
    """Intersection points of two circles; empty when they do not touch."""
    ell = a.distance_to(b)
    if ell == 0.0:
        return ()
    if ell > ra + rb or ell < abs(ra - rb):
        return ()
    along = (ell * ell + ra * ra - rb * rb) / (2.0 * ell)
    off_sq = ra * ra - along * along
    ux, uy = (b.x - a.x) / ell, (b.y - a.y) / ell
    base = GroundPoint(a.x + along * ux, a.y + along * uy)
    if off_sq <= 0.0:
        return (base,)
    off = math.sqrt(off_sq)
    return (
        GroundPoint(base.x - off * uy, base.y + off * ux),
        GroundPoint(base.x + off * uy, base.y - off * ux),
    )


def _tangency_repair(a: GroundPoint, ra: float, b: GroundPoint, rb: float) -> GroundPoint:
    """Point minimizing the larger circle-membership violation.

    For separated circles this is the midpoint of the gap on the center line;
    for nested circles the analogous point beyond the inner circle.
    """
    ell = a.distance_to(b)
    ux, uy = (b.x - a.x) / ell, (b.y - a.y) / ell
    if ell >= ra + rb:
        t = (ra + ell - rb) / 2.0
    elif ra >= rb + ell:
        t = (ra + ell + rb) / 2.0
    else:  # rb >= ra + ell: the gap sits on the far side of a from b
        t = (ell - ra - rb) / 2.0
    return GroundPoint(a.x + t * ux, a.y + t * uy)


def _pick_disambiguator(
    pool: list[RangeMeasurement],
    exclude: set[int],
    cand_a: GroundPoint,
    cand_b: GroundPoint,
) -> tuple[RangeMeasurement | None, float]:
    """Measurement whose range best separates the two candidate points."""
    best: RangeMeasurement | None = None
    best_gap = -1.0
    for m in pool:
        if m.waypoint.id in exclude:
            continue
        mis_a = abs(_pos(m).distance_to(cand_a) - m.projected_ground)
        mis_b = abs(_pos(m).distance_to(cand_b) - m.projected_ground)
        gap = abs(mis_a - mis_b)
        if gap > best_gap + _TIE_EPS:
            best, best_gap = m, gap
    return best, best_gap


def estimate_drbc(measurements: list[RangeMeasurement], c: SelectionConstraints) -> EstimateOutcome:
    """Intersection of two range circles, disambiguated by a third range.

    The circle pair is chosen for the most transversal crossing (largest
    off-axis offset); circles that fail to touch are minimally inflated or
    deflated to tangency, which is the point with the smallest worst-circle
    violation.
    """
    pool = _usable(measurements)
    if len(pool) < 3:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "fewer-than-three-measurements")
    notes: list[str] = []
    window = [m for m in pool if _in_window(m, c)]
    if len(window) < 3:
        window = _nearest_to_target(pool, c)
        notes.append("window-relaxed")

    n = len(window)
    xs = np.asarray([_pos(m).x for m in window])
    ys = np.asarray([_pos(m).y for m in window])
    rs = np.asarray([m.projected_ground for m in window])
    ii, jj = np.triu_indices(n, k=1)
    ell = np.hypot(xs[ii] - xs[jj], ys[ii] - ys[jj])
    valid = (ell > 0) & (rs[ii] > 0) & (rs[jj] > 0)
    # cos of the angle at which the two circles cross; |cos| < 1 means they
    # intersect transversally, and sin of it measures the conditioning of the
    # intersection point against radial errors.
    cos_cross = np.where(
        valid,
        (rs[ii] ** 2 + rs[jj] ** 2 - ell**2) / np.where(valid, 2 * rs[ii] * rs[jj], 1.0),
        2.0,
    )
    sin_cross = np.where(np.abs(cos_cross) < 1.0, np.sqrt(np.maximum(1.0 - cos_cross**2, 0.0)), -1.0)

    pair: tuple[RangeMeasurement, RangeMeasurement]
    if np.any(sin_cross > 0):
        k = int(np.argmax(sin_cross))
        pair = (window[int(ii[k])], window[int(jj[k])])
        candidates = _circle_intersections(
            _pos(pair[0]), pair[0].projected_ground, _pos(pair[1]), pair[1].projected_ground
        )
    else:
        # No pair crosses: repair the least-separated pair to tangency.
        gap = np.where(
            valid,
            np.maximum(ell - (rs[ii] + rs[jj]), np.abs(rs[ii] - rs[jj]) - ell),
            np.inf,
        )
        k = int(np.argmin(gap))
        if not np.isfinite(gap[k]):
            return _failure(EstimateStatus.DEGENERATE, "coincident-anchors")
        pair = (window[int(ii[k])], window[int(jj[k])])
        point = _tangency_repair(
            _pos(pair[0]), pair[0].projected_ground, _pos(pair[1]), pair[1].projected_ground
        )
        note = "tangent-repair" if gap[k] <= 2 * c.tolerance else "degenerate-repair"
        return EstimateOutcome(
            point, EstimateStatus.OK, _ids(pair), tuple(notes) + (note,)
        )

    if len(candidates) == 1:
        return EstimateOutcome(candidates[0], EstimateStatus.OK, _ids(pair), tuple(notes))

    third, gap = _pick_disambiguator(
        pool, {pair[0].waypoint.id, pair[1].waypoint.id}, candidates[0], candidates[1]
    )
    if third is None or gap <= _TIE_EPS:
        return _failure(EstimateStatus.AMBIGUOUS, "third-range-cannot-disambiguate")
    mis = [abs(_pos(third).distance_to(p) - third.projected_ground) for p in candidates]
    chosen = candidates[0] if mis[0] <= mis[1] else candidates[1]
    used = tuple(sorted((*_ids(pair), third.waypoint.id)))
    return EstimateOutcome(chosen, EstimateStatus.OK, used, tuple(notes))


def _circumcenter(a: GroundPoint, b: GroundPoint, cpt: GroundPoint) -> GroundPoint | None:
    d = 2.0 * (a.x * (b.y - cpt.y) + b.x * (cpt.y - a.y) + cpt.x * (a.y - b.y))
    if d == 0.0:
        return None
    asq, bsq, csq = a.x**2 + a.y**2, b.x**2 + b.y**2, cpt.x**2 + cpt.y**2
    ux = (asq * (b.y - cpt.y) + bsq * (cpt.y - a.y) + csq * (a.y - b.y)) / d
    uy = (asq * (cpt.x - b.x) + bsq * (a.x - cpt.x) + csq * (b.x - a.x)) / d
    return GroundPoint(ux, uy)


def _drf_triple(window: list[RangeMeasurement]):
    """Chord anchors in hearing order: the ends of the first scan line's
    in-range stretch, plus the first anchor heard off that line."""
    by_line: dict[int, list[RangeMeasurement]] = {}
    for m in window:
        if m.waypoint.scan_line is not None:
            by_line.setdefault(m.waypoint.scan_line, []).append(m)
    for line, members in sorted(by_line.items(), key=lambda kv: kv[1][0].waypoint.id):
        if len(members) < 2:
            continue
        a1, a2 = members[0], members[-1]
        if _pos(a1).distance_to(_pos(a2)) < _CHORD_EPS:
            continue
        for b in window:
            if b.waypoint.scan_line == line:
                continue
            if _pos(b).distance_to(_pos(a1)) < _CHORD_EPS or _pos(b).distance_to(_pos(a2)) < _CHORD_EPS:
                continue
            if anchors_collinear(_pos(a1), _pos(a2), _pos(b)):
                continue
            return (a1, a2, b)
    # No usable per-line chord: take anchors in hearing order directly.
    for trio in itertools.combinations(window, 3):
        pts = [_pos(m) for m in trio]
        if min(pts[0].distance_to(pts[1]), pts[1].distance_to(pts[2])) < _CHORD_EPS:
            continue
        if not anchors_collinear(*pts):
            return trio
    return None


def estimate_drf(measurements: list[RangeMeasurement], c: SelectionConstraints) -> EstimateOutcome:
    """Chord-bisector construction: circumcenter of three same-distance anchors.

    Treats three waypoints measured at the target distance as points of one
    circle centered on the device, with the chords read off the scan lines in
    hearing order. The measured ranges are not used beyond the selection,
    which is what makes this the lightest and least accurate of the
    algorithms: its error floor is set by the broadcast spacing even with
    perfect ranging.
    """
    pool = _usable(measurements)
    window = [m for m in pool if _in_window(m, c)]
    if len(window) < 3:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "fewer-than-three-in-window")
    trio = _drf_triple(window)
    if trio is None:
        return _failure(EstimateStatus.DEGENERATE, "parallel-or-empty-chords")
    center = _circumcenter(*(_pos(m) for m in trio))
    if center is None:
        return _failure(EstimateStatus.DEGENERATE, "parallel-or-empty-chords")
    return EstimateOutcome(center, EstimateStatus.OK, _ids(trio))


@dataclass(frozen=True)
class _ChordPick:
    """Arrival/departure pair on one scan line plus its outward neighbors."""

    a1: RangeMeasurement
    a2: RangeMeasurement
    pre: GroundPoint
    post: GroundPoint
    proper: bool
    line: int


def _infer_inter_waypoint(pool: list[RangeMeasurement]) -> float | None:
    gaps = [
        _pos(a).distance_to(_pos(b))
        for a, b in itertools.pairwise(pool)
        if b.waypoint.id == a.waypoint.id + 1
        and a.waypoint.scan_line is not None
        and a.waypoint.scan_line == b.waypoint.scan_line
    ]
    return statistics.median(gaps) if gaps else None


def _chord_pick(
    pool: list[RangeMeasurement], c: SelectionConstraints, i_w: float
) -> _ChordPick | None:
    """Choose the scan line whose in-range chord conditions the region best.

    On each line, the waypoints at ground distance <= target form one
    contiguous run; its ends are the arrival and departure anchors. Outward
    neighbors come from the log when present (proper arrival/departure) and
    are extrapolated by one broadcast spacing otherwise. Lines are ranked by
    the transversality of the two anchor circles at the device, which is
    sin of the crossing angle, with proper chords preferred.
    """
    by_line: dict[int, list[RangeMeasurement]] = {}
    for m in pool:
        if m.waypoint.scan_line is not None:
            by_line.setdefault(m.waypoint.scan_line, []).append(m)

    picks: list[tuple[tuple, _ChordPick]] = []
    for line, members in sorted(by_line.items()):
        inside = [m for m in members if m.projected_ground <= c.target_d]
        if len(inside) < 2:
            continue
        a1, a2 = inside[0], inside[-1]
        ell = _pos(a1).distance_to(_pos(a2))
        if ell <= 0:
            continue
        ux, uy = (_pos(a2).x - _pos(a1).x) / ell, (_pos(a2).y - _pos(a1).y) / ell
        by_id = {m.waypoint.id: m for m in members}
        prev = by_id.get(a1.waypoint.id - 1)
        nxt = by_id.get(a2.waypoint.id + 1)
        proper_pre = prev is not None and prev.projected_ground > c.target_d
        proper_post = nxt is not None and nxt.projected_ground > c.target_d
        pre = _pos(prev) if proper_pre else GroundPoint(_pos(a1).x - i_w * ux, _pos(a1).y - i_w * uy)
        post = _pos(nxt) if proper_post else GroundPoint(_pos(a2).x + i_w * ux, _pos(a2).y + i_w * uy)
        proper = proper_pre and proper_post
        # sin of the circle crossing angle at the device: ell * sqrt(4d^2-ell^2) / 2d^2
        half = min(ell / (2.0 * c.target_d), 1.0)
        transversality = 2.0 * half * math.sqrt(max(1.0 - half * half, 0.0))
        picks.append(((not proper, -transversality, line), _ChordPick(a1, a2, pre, post, proper, line)))
    if not picks:
        return None
    picks.sort(key=lambda item: item[0])
    return picks[0][1]


def _region_centroid(
    membership, center: GroundPoint, u: tuple[float, float], v: tuple[float, float],
    t_half: float, n_half: float, resolution: float,
) -> tuple[GroundPoint | None, float | None]:
    """Centroid and diameter of {x : membership(x)} by dense grid sampling.

    The grid lives in the (u, v) frame anchored at ``center`` so symmetric
    regions stay numerically symmetric. Progressively finer bracketing passes
    locate the region, then a pass at ``resolution`` measures it.
    """

    def sample(res: float, t_lo: float, t_hi: float, n_lo: float, n_hi: float):
        ts = np.arange(math.floor(t_lo / res), math.ceil(t_hi / res) + 1) * res
        ns = np.arange(math.floor(n_lo / res), math.ceil(n_hi / res) + 1) * res
        tg, ng = np.meshgrid(ts, ns, indexing="ij")
        px = center.x + tg * u[0] + ng * v[0]
        py = center.y + tg * u[1] + ng * v[1]
        keep = membership(px.ravel(), py.ravel())
        return tg.ravel()[keep], ng.ravel()[keep], px.ravel()[keep], py.ravel()[keep]

    bracket = None
    bracket_res = resolution
    for res in (0.2, 0.05, resolution):
        if res < resolution:
            continue
        cells = (2 * t_half / res + 1) * (2 * n_half / res + 1)
        if cells > 4e6:  # a full-box pass this fine would thrash; treat as empty
            continue
        t, nn, _, _ = sample(res, -t_half, t_half, -n_half, n_half)
        if t.size:
            bracket, bracket_res = (t, nn), res
            break
    if bracket is None:
        return None, None
    t, nn = bracket
    pad = 2.0 * bracket_res
    t, nn, px, py = sample(
        resolution,
        float(t.min()) - pad, float(t.max()) + pad,
        float(nn.min()) - pad, float(nn.max()) + pad,
    )
    if t.size == 0:
        return None, None
    centroid = GroundPoint(float(px.mean()), float(py.mean()))
    return centroid, _diameter(px, py)


def _diameter(px: np.ndarray, py: np.ndarray) -> float:
    if px.size == 1:
        return 0.0
    pts = np.column_stack([px, py])
    if px.size > 16:
        try:
            from scipy.spatial import ConvexHull

            pts = pts[ConvexHull(pts).vertices]
        except Exception:  # collinear membership sets raise QhullError
            pass
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).max())


def _area_center_estimate(
    measurements: list[RangeMeasurement], c: SelectionConstraints, annulus: bool
) -> EstimateOutcome:
    """Shared machinery of the two area-centroid algorithms (ioc, ioa)."""
    pool = _usable(measurements)
    i_w = c.inter_waypoint if c.inter_waypoint is not None else _infer_inter_waypoint(pool)
    if i_w is None or i_w <= 0:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "unknown-inter-waypoint")
    pick = _chord_pick(pool, c, i_w)
    if pick is None:
        return _failure(EstimateStatus.NO_VALID_TRIPLE, "no-same-line-pair-in-range")
    notes: list[str] = [] if pick.proper else ["truncated-chord"]

    d = c.target_d
    p1, p2 = _pos(pick.a1), _pos(pick.a2)
    ell = p1.distance_to(p2)
    mid = GroundPoint((p1.x + p2.x) / 2.0, (p1.y + p2.y) / 2.0)
    ux, uy = (p2.x - p1.x) / ell, (p2.y - p1.y) / ell
    apothem_sq = d * d - (ell / 2.0) ** 2
    apothem = math.sqrt(apothem_sq) if apothem_sq > 0 else 0.0

    used = [pick.a1.waypoint.id, pick.a2.waypoint.id]
    if apothem == 0.0:
        # Circles merely touch: both candidate sides collapse onto the line.
        return EstimateOutcome(
            mid, EstimateStatus.OK, tuple(sorted(used)), tuple(notes) + ("tangent-chord",)
        )

    cand_a = GroundPoint(mid.x - apothem * uy, mid.y + apothem * ux)
    cand_b = GroundPoint(mid.x + apothem * uy, mid.y - apothem * ux)
    off_line = [
        m
        for m in pool
        if m.waypoint.scan_line != pick.line
        and abs((_pos(m).x - p1.x) * uy - (_pos(m).y - p1.y) * ux) > 1e-9
    ]
    third, gap = _pick_disambiguator(off_line, set(), cand_a, cand_b)
    if third is None or gap <= _TIE_EPS:
        return _failure(EstimateStatus.AMBIGUOUS, "no-off-line-disambiguator")
    mis_a = abs(_pos(third).distance_to(cand_a) - third.projected_ground)
    mis_b = abs(_pos(third).distance_to(cand_b) - third.projected_ground)
    side = 1.0 if mis_a <= mis_b else -1.0
    nx, ny = -uy * side, ux * side
    used.append(third.waypoint.id)

    a1x, a1y, a2x, a2y = p1.x, p1.y, p2.x, p2.y
    prex, prey, postx, posty = pick.pre.x, pick.pre.y, pick.post.x, pick.post.y
    inner = d - i_w

    def membership(px: np.ndarray, py: np.ndarray) -> np.ndarray:
        r1 = np.hypot(px - a1x, py - a1y)
        r2 = np.hypot(px - a2x, py - a2y)
        keep = (r1 <= d) & (r2 <= d)
        if annulus:
            keep &= (r1 >= inner) & (r2 >= inner)
        else:
            keep &= np.hypot(px - prex, py - prey) >= d
            keep &= np.hypot(px - postx, py - posty) >= d
        return keep

    center = GroundPoint(mid.x + apothem * nx, mid.y + apothem * ny)
    # The region hugs the candidate intersection point; a couple of broadcast
    # spacings of slack in each direction brackets it at any geometry.
    t_half = min(ell / 2.0 + i_w, d)
    n_span = min(2.0 * i_w + d - apothem, d)
    centroid, diameter = _region_centroid(
        lambda px, py: membership(px, py)
        & ((px - mid.x) * nx + (py - mid.y) * ny >= 0.0),
        center,
        (ux, uy),
        (nx, ny),
        t_half,
        n_span,
        c.region_grid,
    )
    if centroid is None:
        if annulus:
            half_sq = (d - i_w / 2.0) ** 2 - (ell / 2.0) ** 2
            off = math.sqrt(half_sq) if half_sq > 0 else 0.0
            fallback = GroundPoint(mid.x + off * nx, mid.y + off * ny)
        else:
            fallback = GroundPoint(mid.x + apothem * nx, mid.y + apothem * ny)
        return EstimateOutcome(
            fallback, EstimateStatus.OK, tuple(sorted(used)), tuple(notes) + ("empty-region-fallback",)
        )
    return EstimateOutcome(
        centroid, EstimateStatus.OK, tuple(sorted(used)), tuple(notes), diameter
    )


def estimate_ioc(measurements: list[RangeMeasurement], c: SelectionConstraints) -> EstimateOutcome:
    """Centroid of the region bounded by the arrival/departure circles.

    The device lies within the target distance of both chord ends but beyond
    it from the pre-arrival and post-departure positions; the estimate is the
    area centroid of that region on the side selected by a third range.
    """
    return _area_center_estimate(measurements, c, annulus=False)


def estimate_ioa(measurements: list[RangeMeasurement], c: SelectionConstraints) -> EstimateOutcome:
    """Centroid of the intersection of two annuli around the chord ends.

    Each annulus spans one broadcast spacing inward from the target distance;
    the side is selected by a third range, and an empty region falls back to
    the crossing of the two mid-annulus circles.
    """
    return _area_center_estimate(measurements, c, annulus=True)


ALGORITHMS = {
    "omni": estimate_omni,
    "scan": estimate_scan,
    "drbc": estimate_drbc,
    "drf": estimate_drf,
    "ioc": estimate_ioc,
    "ioa": estimate_ioa,
}
