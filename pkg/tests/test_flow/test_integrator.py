"""梯度流积分测试"""

from dataclasses import replace

import numpy as np
import pytest

from app.core.entities import DEFAULT_FLOW, Termination
from app.core.errors import StepUnderflowError
from app.core.flow import (
    BatchFlow,
    advance,
    energy_defect,
    integrate,
    write_trajectory_csv,
)


def _regular_points(field, rng, count, floor=0.1):
    """远离临界点的随机起点"""
    P = rng.uniform(0, 2 * np.pi, size=(count * 4, field.dim))
    P = P[field.grad_norm(P) > floor]
    return P[:count]


class TestIntegrate:
    """单条轨线"""

    def test_zero_time_is_identity(self, torus_height):
        p = np.array([0.3, 1.2])
        traj = integrate(torus_height, p, 0.0)
        assert len(traj) == 1
        assert np.array_equal(traj.final_point, p)

    def test_cos_theta_converges_to_minimum(self, cos_theta, circle_crit):
        traj = integrate(cos_theta, np.pi / 2, np.inf, until_converged=True, critical=circle_crit)
        assert traj.termination == Termination.CONVERGED
        assert abs(traj.final_point[0] - np.pi) < 1e-6
        assert traj.critical_id == circle_crit[0].id

    def test_monotone_decrease(self, torus_height, rng):
        for p in _regular_points(torus_height, rng, 5):
            traj = integrate(torus_height, p, 5.0)
            df = np.diff(traj.values)
            assert np.all(df <= DEFAULT_FLOW.tol_mono)
            moving = torus_height.grad_norm(traj.points[:-1]) > 10 * DEFAULT_FLOW.delta_conv
            assert np.all(df[moving] < 0)

    def test_times_increase_forward(self, torus_height):
        traj = integrate(torus_height, [1.0, 2.0], 1.0)
        assert np.all(np.diff(traj.times) > 0)
        assert traj.duration == pytest.approx(1.0)
        assert np.max(np.diff(traj.times)) <= DEFAULT_FLOW.h + 1e-15

    def test_backward_times_are_signed(self, torus_height):
        traj = integrate(torus_height, [1.0, 2.0], -1.0)
        assert traj.direction == -1
        assert traj.duration == pytest.approx(-1.0)
        assert traj.final_value > traj.values[0]

    def test_reversibility(self, torus_height, rng):
        for p in _regular_points(torus_height, rng, 5):
            q = integrate(torus_height, p, 1.0).final_point
            back = integrate(torus_height, q, -1.0).final_point
            assert torus_height.surface.chart_distance(back, p) < 1e-5

    def test_energy_identity(self, torus_height, rng):
        for p in _regular_points(torus_height, rng, 3):
            traj = integrate(torus_height, p, 3.0)
            assert energy_defect(traj, torus_height) < 1e-5

    def test_step_underflow(self, torus_height):
        cfg = replace(DEFAULT_FLOW, tol_int=1e-30, h_min=1e-3)
        with pytest.raises(StepUnderflowError):
            integrate(torus_height, [1.0, 2.0], 1.0, cfg)


class TestBatchFlow:
    """批量推进"""

    def test_group_law(self, torus_height, rng):
        P = _regular_points(torus_height, rng, 50, floor=0.0)
        s = rng.uniform(0, 1, size=len(P))
        t = rng.uniform(0, 1, size=len(P))
        split = BatchFlow(torus_height, P).advance(t).advance(s).points
        joint = BatchFlow(torus_height, P).advance(s + t).points
        assert np.all(torus_height.surface.chart_distance(split, joint) < 1e-6)

    def test_matches_recorded_trajectory(self, torus_height):
        p = np.array([1.0, 2.0])
        batched = advance(torus_height, p[None, :], 2.0)[0]
        recorded = integrate(torus_height, p, 2.0).final_point
        assert torus_height.surface.chart_distance(batched, recorded) < 1e-6

    def test_inactive_rows_stay_put(self, torus_height):
        P = np.array([[1.0, 2.0], [2.0, 1.0]])
        flow = BatchFlow(torus_height, P)
        flow.deactivate([1])
        flow.advance(1.0)
        assert np.array_equal(flow.points[1], P[1])
        assert flow.elapsed[0] == pytest.approx(1.0)

    def test_underflow_marks_rows(self, torus_height):
        cfg = replace(DEFAULT_FLOW, tol_int=1e-30, h_min=1e-3)
        flow = BatchFlow(torus_height, [[1.0, 2.0]], config=cfg).advance(1.0)
        assert flow.failed[0]
        assert np.all(np.isnan(flow.points[0]))


class TestTrajectoryExport:
    """CSV 导出"""

    def test_surface_header(self, torus_height, tmp_path):
        traj = integrate(torus_height, [1.0, 2.0], 0.05)
        path = write_trajectory_csv(traj, tmp_path / "traj.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,u,v,f"
        assert len(lines) == len(traj) + 1
        assert len(lines[1].split(",")) == 4

    def test_circle_omits_v(self, cos_theta, tmp_path):
        traj = integrate(cos_theta, 1.0, 0.05)
        lines = write_trajectory_csv(traj, tmp_path / "c.csv").read_text().splitlines()
        assert lines[0] == "t,u,f"
        assert len(lines[-1].split(",")) == 3
