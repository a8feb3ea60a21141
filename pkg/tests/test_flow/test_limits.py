"""渐近极限测试"""

from dataclasses import replace

import numpy as np
import pytest

from app.core.entities import DEFAULT_FLOW
from app.core.errors import HorizonExceededError
from app.core.flow import backward_limit, forward_limit, forward_limits

# 三次函数在退化点附近按多项式速度收敛
SLOW_FLOW = replace(DEFAULT_FLOW, h_max=10.0, horizon=1e4)


class TestTorusLimits:
    """环面高度函数"""

    def test_generic_points_reach_minimum(self, torus_height, torus_crit, rng):
        P = rng.uniform(0, 2 * np.pi, size=(1000, 2))
        ids = forward_limits(torus_height, P, torus_crit)
        assert np.mean(ids == torus_crit[0].id) >= 0.95

    def test_generic_points_come_from_maximum(self, torus_height, torus_crit, rng):
        P = rng.uniform(0, 2 * np.pi, size=(200, 2))
        from app.core.flow import backward_limits

        ids = backward_limits(torus_height, P, torus_crit)
        assert np.mean(ids == torus_crit[-1].id) >= 0.95

    def test_critical_point_is_its_own_limit(self, torus_height, torus_crit):
        for c in torus_crit:
            assert forward_limit(torus_height, c.point, torus_crit).id == c.id
            assert backward_limit(torus_height, c.point, torus_crit).id == c.id


class TestDegenerateLimits:
    """sin³θ：0 与 π 处的退化临界点"""

    def test_forward_limit_near_zero(self, cubic_circle, cubic_crit):
        c = forward_limit(cubic_circle, 0.1, cubic_crit, config=SLOW_FLOW)
        assert cubic_circle.surface.chart_distance(c.point, [0.0]) < 1e-3
        assert c.is_degenerate

    def test_backward_limit_near_zero(self, cubic_circle, cubic_crit):
        c = backward_limit(cubic_circle, 2 * np.pi - 0.1, cubic_crit, config=SLOW_FLOW)
        assert cubic_circle.surface.chart_distance(c.point, [0.0]) < 1e-3

    def test_default_horizon_is_exceeded(self, cubic_circle, cubic_crit):
        with pytest.raises(HorizonExceededError) as exc:
            forward_limit(cubic_circle, 0.1, cubic_crit)
        assert exc.value.final_point is not None
        assert 0 < exc.value.final_point[0] < 0.1

    def test_batched_failure_is_minus_one(self, cubic_circle, cubic_crit):
        ids = forward_limits(cubic_circle, np.array([[0.1], [4.0]]), cubic_crit)
        assert ids[0] == -1
        assert cubic_crit[ids[1]].value == pytest.approx(-1.0)
