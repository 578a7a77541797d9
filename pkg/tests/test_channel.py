import math

import numpy as np
import pytest

from uavloc.channel import (
    Environment,
    LinkBudget,
    link_up,
    link_up_given,
    los_probability,
    los_probability_batch,
)

# The published line-of-sight table: ratio -> (sub-urban, urban, dense, highrise)
TABLE = {
    5.67: (1.00, 1.00, 1.00, 1.00),
    math.sqrt(3.0): (1.00, 1.00, 1.00, 0.60),
    1.0: (1.00, 0.97, 0.85, 0.30),
    0.5: (1.00, 0.75, 0.30, 0.05),
    1.0 / 3.0: (1.00, 0.40, 0.20, 0.00),
}
ENVS = (Environment.SUB_URBAN, Environment.URBAN, Environment.DENSE, Environment.HIGHRISE)


class TestLosProbability:
    @pytest.mark.parametrize("ratio", sorted(TABLE))
    def test_tabulated_cells(self, ratio):
        for env, expected in zip(ENVS, TABLE[ratio]):
            assert los_probability(env, ratio) == expected

    def test_urban_unit_ratio(self):
        assert los_probability(Environment.URBAN, 1.0) == 0.97

    def test_dense_half_ratio(self):
        assert los_probability(Environment.DENSE, 0.5) == 0.30

    def test_sub_urban_always_full(self):
        for ratio in (1 / 3, 0.4, 1.0, 2.0, 10.0):
            assert los_probability(Environment.SUB_URBAN, ratio) == 1.0

    def test_step_function_floor_row(self):
        assert los_probability(Environment.URBAN, 1.5) == 0.97
        assert los_probability(Environment.URBAN, 0.4) == 0.40

    def test_above_top_row(self):
        for env in ENVS:
            assert los_probability(env, 6.0) == 1.0
            assert los_probability(env, math.inf) == 1.0

    def test_below_bottom_row(self):
        assert los_probability(Environment.URBAN, 0.1) == 0.40
        assert los_probability(Environment.HIGHRISE, 0.1) == 0.0

    def test_monotone_in_ratio(self):
        ratios = np.linspace(0, 6, 200)
        for env in ENVS:
            probs = [los_probability(env, r) for r in ratios]
            assert all(a <= b + 1e-12 for a, b in zip(probs, probs[1:]))

    def test_batch_matches_scalar(self):
        ratios = np.linspace(0, 7, 57)
        for env in ENVS:
            batch = los_probability_batch(env, ratios)
            scalar = [los_probability(env, float(r)) for r in ratios]
            assert list(batch) == pytest.approx(scalar)


class TestLinkUp:
    def test_short_range_always_up(self):
        budget = LinkBudget()
        for env in ENVS:
            assert link_up(env, budget, 30.0, 0.01, np.random.default_rng(0))

    def test_beyond_los_range_never_up(self):
        assert not link_up(Environment.SUB_URBAN, LinkBudget(), 70.0, 1.0, np.random.default_rng(0))

    def test_sub_urban_mid_range_deterministic(self):
        budget = LinkBudget()
        for seed in range(20):
            assert link_up(Environment.SUB_URBAN, budget, 50.0, 1 / 3, np.random.default_rng(seed))

    def test_monotone_in_slant_for_fixed_draw(self):
        budget = LinkBudget()
        rng = np.random.default_rng(4)
        for _ in range(500):
            u = float(rng.random())
            env = ENVS[rng.integers(0, 4)]
            ratio = float(rng.uniform(0, 3))
            s1 = float(rng.uniform(0, 80))
            s2 = float(rng.uniform(0, s1))
            if link_up_given(env, budget, s1, ratio, u):
                assert link_up_given(env, budget, s2, ratio, u)

    def test_bernoulli_rate_matches_table(self):
        rng = np.random.default_rng(8)
        n = 20_000
        ups = sum(link_up(Environment.DENSE, LinkBudget(), 50.0, 1.0, rng) for _ in range(n))
        assert ups / n == pytest.approx(0.85, abs=0.01)

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            LinkBudget(los_range=10, nlos_range=20)
        with pytest.raises(ValueError):
            LinkBudget(los_range=10, nlos_range=0)
