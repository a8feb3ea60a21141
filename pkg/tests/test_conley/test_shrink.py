"""收缩搜索测试"""

import numpy as np
import pytest

from app.core.conley import build_conley_pair, shrink_into
from app.core.errors import SearchExhaustedError


def _ball(field, mesh, x, radius):
    d = field.surface.chart_distance(mesh.params, np.broadcast_to(x.point, mesh.params.shape))
    return set(np.flatnonzero(d <= radius).tolist())


class TestShrinkInto:
    """ε 减半与 τ 加倍交替"""

    def test_whole_mesh_keeps_parameters(self, cos_theta, circle_mesh, circle_crit):
        top = circle_crit[-1]
        assert shrink_into(cos_theta, circle_mesh, top, range(circle_mesh.V)) == (0.2, 2.0)

    def test_small_neighbourhood(self, cos_theta, circle_mesh, circle_crit):
        top = circle_crit[-1]
        U = _ball(cos_theta, circle_mesh, top, 0.05)
        eps, tau = shrink_into(cos_theta, circle_mesh, top, U)
        assert eps < 0.2 and tau >= 2.0
        pair = build_conley_pair(cos_theta, circle_mesh, top, eps, tau)
        assert pair.N <= U
        assert pair.start_vertex in pair.interior

    def test_single_vertex_is_exhausted(self, torus_height, torus_mesh, torus_crit):
        x = torus_crit[2]
        start = int(torus_mesh.nearest_vertex(x.point))
        with pytest.raises(SearchExhaustedError) as exc:
            shrink_into(torus_height, torus_mesh, x, {start})
        assert start in exc.value.smallest_block


@pytest.mark.slow
class TestShrinkTorus:
    """环面鞍点，U 为坐标卡半径 0.5 的邻域"""

    def test_contained(self, torus_height, fine_torus_mesh, torus_crit):
        x = torus_crit[2]
        U = _ball(torus_height, fine_torus_mesh, x, 0.5)
        eps, tau = shrink_into(torus_height, fine_torus_mesh, x, U)
        pair = build_conley_pair(torus_height, fine_torus_mesh, x, eps, tau)
        assert pair.N <= U
