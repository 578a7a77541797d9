import math

import numpy as np
import pytest

from uavloc.errors import AccuracyProfile
from uavloc.geometry import GroundPoint, TriangleGeometry, Waypoint, beta_angles
from uavloc.trilateration import (
    CollinearAnchorsError,
    RangeMeasurement,
    check_lemma,
    star_vertex_distance,
    trilaterate,
    trilateration_accuracy,
)


def meas(x, y, d, wp_id=0):
    return RangeMeasurement(Waypoint(GroundPoint(x, y), 0.0, wp_id), d, d, False)


def equilateral_anchors():
    return [(0.0, 0.0), (40.0, 0.0), (20.0, 34.641016151377546)]


EQUILATERAL_CENTER = GroundPoint(20.0, 11.547005383792515)


def grid_oracle(anchors, dists, x_lo, x_hi, y_lo, y_hi):
    """Brute-force minimizer of the squared-residual objective.

    Hierarchical refinement down to 1 mm; independent of the solver under
    test (plain numpy grid evaluation).
    """

    def argmin(lo_x, hi_x, lo_y, hi_y, step):
        xs = np.arange(lo_x, hi_x + step / 2, step)
        ys = np.arange(lo_y, hi_y + step / 2, step)
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        obj = np.zeros_like(xx)
        for (ax, ay), d in zip(anchors, dists):
            obj += (d - np.sqrt((xx - ax) ** 2 + (yy - ay) ** 2)) ** 2
        k = np.unravel_index(np.argmin(obj), obj.shape)
        return float(xs[k[0]]), float(ys[k[1]]), float(obj[k])

    x, y, _ = argmin(x_lo, x_hi, y_lo, y_hi, 0.1)
    x, y, _ = argmin(x - 0.2, x + 0.2, y - 0.2, y + 0.2, 0.01)
    return argmin(x - 0.02, x + 0.02, y - 0.02, y + 0.02, 0.001)


class TestTrilaterate:
    def test_zero_noise_equilateral(self):
        p = EQUILATERAL_CENTER
        ms = [
            meas(ax, ay, math.hypot(ax - p.x, ay - p.y), i)
            for i, (ax, ay) in enumerate(equilateral_anchors())
        ]
        r = trilaterate(*ms)
        assert r.estimate.distance_to(p) < 1e-6
        assert r.objective <= 1e-12
        assert r.converged

    def test_symmetric_inflation_cancels(self):
        p = EQUILATERAL_CENTER
        ms = [
            meas(ax, ay, math.hypot(ax - p.x, ay - p.y) + 0.1, i)
            for i, (ax, ay) in enumerate(equilateral_anchors())
        ]
        r = trilaterate(*ms)
        assert r.estimate.distance_to(p) < 1e-6
        assert r.objective == pytest.approx(3 * 0.1**2, abs=1e-9)

    def test_noisy_instance_matches_grid_oracle(self):
        anchors = [(0.0, 0.0), (8.0, 0.0), (4.0, 10.0)]
        dists = [5.1, 5.0, 7.0]
        ms = [meas(ax, ay, d, i) for i, ((ax, ay), d) in enumerate(zip(anchors, dists))]
        r = trilaterate(*ms)
        gx, gy, gobj = grid_oracle(anchors, dists, -5, 15, -5, 15)
        # frozen oracle values for this instance
        assert (gx, gy) == pytest.approx((4.063, 3.035), abs=1e-9)
        assert r.estimate.distance_to(GroundPoint(gx, gy)) <= 2e-3
        assert r.objective <= gobj + 1e-6

    def test_random_instances_beat_grid_oracle(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            p = rng.uniform(-2, 2, 2)
            anchors = []
            while len(anchors) < 3:
                cand = rng.uniform(-10, 10, 2)
                if all(np.hypot(*(cand - a)) > 1.0 for a in anchors):
                    anchors.append(cand)
            try:
                ms = [
                    meas(a[0], a[1], float(np.hypot(*(p - a)) + rng.uniform(-0.2, 0.2)), i)
                    for i, a in enumerate(anchors)
                ]
                r = trilaterate(*ms)
            except CollinearAnchorsError:
                continue
            _, _, gobj = grid_oracle(
                [tuple(a) for a in anchors],
                [m.projected_ground for m in ms],
                p[0] - 3, p[0] + 3, p[1] - 3, p[1] + 3,
            )
            assert r.objective <= gobj + 1e-6

    def test_rejects_collinear_anchors(self):
        with pytest.raises(CollinearAnchorsError):
            trilaterate(meas(0, 0, 5, 0), meas(5, 0, 3, 1), meas(10, 0, 5, 2))

    def test_rejects_duplicate_anchors(self):
        with pytest.raises(CollinearAnchorsError):
            trilaterate(meas(0, 0, 5, 0), meas(0, 0, 3, 1), meas(10, 0, 5, 2))

    def test_rigid_motion_equivariance(self):
        rng = np.random.default_rng(31)
        anchors = [(0.0, 0.0), (8.0, 0.0), (4.0, 10.0)]
        dists = [5.1, 5.0, 7.0]
        base = trilaterate(*(meas(ax, ay, d, i) for i, ((ax, ay), d) in enumerate(zip(anchors, dists))))
        for _ in range(20):
            theta = rng.uniform(0, 2 * math.pi)
            tx, ty = rng.uniform(-50, 50, 2)
            ct, st = math.cos(theta), math.sin(theta)
            moved = [
                (ct * ax - st * ay + tx, st * ax + ct * ay + ty) for ax, ay in anchors
            ]
            r = trilaterate(*(meas(ax, ay, d, i) for i, ((ax, ay), d) in enumerate(zip(moved, dists))))
            ex = ct * base.estimate.x - st * base.estimate.y + tx
            ey = st * base.estimate.x + ct * base.estimate.y + ty
            assert r.estimate.distance_to(GroundPoint(ex, ey)) < 1e-6


class TestStarVertex:
    def test_same_sign_60(self):
        assert star_vertex_distance(1.0, math.radians(60), True) == pytest.approx(2.0)

    def test_different_sign_90(self):
        assert star_vertex_distance(1.0, math.radians(90), False) == pytest.approx(math.sqrt(2))

    def test_linear_in_error(self):
        assert star_vertex_distance(0.76, math.radians(60), True) == pytest.approx(1.52)

    def test_same_sign_unbounded_at_zero(self):
        with pytest.raises(ValueError):
            star_vertex_distance(1.0, 0.0, True)

    def test_same_sign_dominates_different_sign(self):
        # With the minimum angle below 60 degrees, the same-sign vertex at
        # beta_min is the farthest of all star vertices.
        rng = np.random.default_rng(2)
        for _ in range(200):
            cuts = np.sort(rng.uniform(0, math.pi, 2))
            betas = sorted([cuts[0], cuts[1] - cuts[0], math.pi - cuts[1]])
            if betas[0] < 1e-6:
                continue
            worst = star_vertex_distance(1.0, betas[0], True)
            for b in betas:
                assert worst >= star_vertex_distance(1.0, b, True) - 1e-12
                assert worst >= star_vertex_distance(1.0, b, False) - 1e-12


class TestAccuracyBound:
    def test_flat_60(self):
        profile = AccuracyProfile(0.10, 0, 0)
        assert trilateration_accuracy(profile, 0, 20, math.radians(60)) == pytest.approx(0.2)

    def test_minimized_at_60_degrees(self):
        profile = AccuracyProfile(0.10, 0.6, 0.1)
        betas = np.linspace(0.05, math.pi / 3, 50)
        bounds = [trilateration_accuracy(profile, 10, 30, b) for b in betas]
        assert all(a >= b - 1e-12 for a, b in zip(bounds, bounds[1:]))
        assert min(bounds) == bounds[-1]

    def test_rejects_degenerate_angle(self):
        with pytest.raises(ValueError):
            trilateration_accuracy(AccuracyProfile(0.1, 0, 0), 0, 20, 0.0)
        with pytest.raises(ValueError):
            trilateration_accuracy(AccuracyProfile(0.1, 0, 0), 0, 20, math.pi / 2)

    def test_rejects_zero_distance(self):
        with pytest.raises(ValueError):
            trilateration_accuracy(AccuracyProfile(0.1, 0, 0), 10, 0, math.radians(60))


class TestLemma:
    def test_equilateral(self):
        geom = TriangleGeometry(tuple(sorted([math.pi / 3] * 3)))
        assert check_lemma(geom)
        assert math.sin(geom.beta_min / 2) < math.cos(geom.beta_max / 2)

    def test_specific_triple(self):
        geom = TriangleGeometry(
            tuple(sorted([math.radians(10), math.radians(80), math.radians(90)]))
        )
        assert check_lemma(geom)

    def test_random_sweep(self):
        rng = np.random.default_rng(6)
        cuts = np.sort(rng.uniform(0, math.pi, (100_000, 2)), axis=1)
        b1 = cuts[:, 0]
        b2 = cuts[:, 1] - cuts[:, 0]
        b3 = math.pi - cuts[:, 1]
        bmin = np.minimum(np.minimum(b1, b2), b3)
        bmax = np.maximum(np.maximum(b1, b2), b3)
        assert np.all(np.sin(bmin / 2) <= np.cos(bmax / 2) + 1e-15)


class TestBoundDominance:
    @pytest.mark.parametrize("beta_deg", [30, 45, 60])
    def test_extreme_sign_patterns_within_bound(self, beta_deg):
        from uavloc.mission import controlled_anchor_triple

        eps_d = 0.5
        d = 20.0
        bound = eps_d / math.sin(math.radians(beta_deg) / 2)
        anchors = controlled_anchor_triple(d, math.radians(beta_deg), 0.0)
        p = GroundPoint(0, 0)
        geom = beta_angles(p, *(w.position for w in anchors))
        assert geom.beta_min == pytest.approx(math.radians(beta_deg), abs=1e-9)
        for signs in ((s1, s2, s3) for s1 in (-1, 1) for s2 in (-1, 1) for s3 in (-1, 1)):
            ms = [
                meas(w.position.x, w.position.y, d + s * eps_d, i)
                for i, (w, s) in enumerate(zip(anchors, signs))
            ]
            r = trilaterate(*ms)
            assert r.estimate.distance_to(p) <= bound * 1.05
