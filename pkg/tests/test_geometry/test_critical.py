"""临界点搜索与分类测试"""

import numpy as np
import pytest

from app.core.entities import CriticalKind
from app.core.errors import InvalidParametersError
from app.core.geometry import (
    build_mesh,
    find_critical_points,
    is_morse,
    min_pairwise_distance,
    morse_counts,
    select_points,
)
from app.core.geometry.critical import CriticalPoint


class TestTorusHeight:
    """环面高度函数：4 个非退化临界点"""

    def test_values_and_indices(self, torus_crit):
        assert len(torus_crit) == 4
        assert np.allclose([p.value for p in torus_crit], [-3, -1, 1, 3], atol=1e-6)
        assert [p.index for p in torus_crit] == [0, 1, 1, 2]
        assert all(p.grad_norm <= 1e-10 for p in torus_crit)

    def test_maximum_location(self, torus_crit, torus):
        top = torus_crit[-1]
        assert torus.chart_distance(top.point, [np.pi / 2, 0.0]) < 1e-8

    def test_stable_across_resolution(self, torus, torus_height):
        coarse = find_critical_points(torus_height, build_mesh(torus, torus_height, n=32))
        fine = find_critical_points(torus_height, build_mesh(torus, torus_height, n=128))
        assert [p.index for p in coarse] == [p.index for p in fine] == [0, 1, 1, 2]

    def test_poincare_hopf(self, torus_crit, torus_mesh):
        assert sum((-1) ** p.index for p in torus_crit) == torus_mesh.euler_characteristic

    def test_morse_counts(self, torus_crit):
        assert is_morse(torus_crit)
        assert morse_counts(torus_crit, 2) == [1, 2, 1]

    def test_isolation_reported(self, torus_crit, torus):
        assert min_pairwise_distance(torus_crit, torus) > 1.0
        assert min_pairwise_distance(torus_crit[:1], torus) == float("inf")


class TestSphereAndCircle:
    """球面与圆周上的内置函数"""

    def test_sphere_height(self, sphere_crit, sphere_mesh):
        assert [p.index for p in sphere_crit] == [0, 2]
        assert np.allclose([p.value for p in sphere_crit], [-1, 1], atol=1e-9)
        assert sum((-1) ** p.index for p in sphere_crit) == sphere_mesh.euler_characteristic

    def test_cos_theta(self, circle_crit):
        assert np.allclose([p.value for p in circle_crit], [-1, 1], atol=1e-9)
        assert [p.index for p in circle_crit] == [0, 1]

    def test_cubic_degenerate_points(self, cubic_crit):
        assert len(cubic_crit) == 4
        assert np.allclose([p.value for p in cubic_crit], [-1, 0, 0, 1], atol=1e-9)
        kinds = [p.kind for p in cubic_crit]
        assert kinds[1] == kinds[2] == CriticalKind.DEGENERATE
        assert kinds[0] == kinds[3] == CriticalKind.NONDEGENERATE
        assert cubic_crit[1].index is None
        assert not is_morse(cubic_crit)

    def test_cubic_locations(self, cubic_crit, circle):
        found = sorted(float(p.x[0]) for p in cubic_crit)
        expected = [0.0, np.pi / 2, np.pi, 3 * np.pi / 2]
        for got, want in zip(found, expected):
            assert circle.chart_distance([got], [want]) < 1e-4

    def test_double_well_equal_maxima(self, double_well, circle):
        points = find_critical_points(double_well, build_mesh(circle, double_well, n=256))
        assert [p.index for p in points] == [0, 0, 1, 1]
        assert points[2].value == pytest.approx(points[3].value)


class TestSelectPoints:
    """--crit 选择器"""

    def test_selectors(self, torus_crit):
        assert [p.id for p in select_points(torus_crit, "min", 2)] == [0]
        assert [p.id for p in select_points(torus_crit, "max", 2)] == [3]
        assert [p.id for p in select_points(torus_crit, "saddle", 2)] == [1, 2]
        assert [p.id for p in select_points(torus_crit, "2", 2)] == [2]
        assert len(select_points(torus_crit, "all", 2)) == 4

    def test_bad_selector(self, torus_crit):
        with pytest.raises(InvalidParametersError):
            select_points(torus_crit, "top", 2)
        with pytest.raises(InvalidParametersError):
            select_points(torus_crit, "9", 2)

    def test_dict_round_trip(self, torus_crit):
        p = torus_crit[1]
        assert CriticalPoint.from_dict(p.to_dict()) == p
