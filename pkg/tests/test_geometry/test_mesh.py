"""三角剖分构造与导出测试"""

import numpy as np
import pytest

from app.core.errors import ResolutionTooSmallError, UnsupportedCombinationError
from app.core.geometry import build_mesh, builtin_field, make_surface, write_mesh_text
from app.core.geometry.mesh import sphere_level


class TestBuildMesh:
    """网格计数、欧拉示性数与周期粘合"""

    def test_torus_counts(self, torus_mesh):
        n = 64
        assert (torus_mesh.V, torus_mesh.E, torus_mesh.F) == (n * n, 3 * n * n, 2 * n * n)
        assert torus_mesh.euler_characteristic == 0

    def test_torus_has_no_seam_duplicates(self, torus_mesh):
        unique = np.unique(np.round(torus_mesh.points, 9), axis=0)
        assert unique.shape[0] == torus_mesh.V

    def test_sphere_level_four(self, sphere_mesh):
        assert sphere_level(64) == 4
        assert sphere_mesh.V == 10 * 4**4 + 2
        assert sphere_mesh.euler_characteristic == 2

    def test_sphere_extrema_are_vertices(self, sphere_mesh):
        assert sphere_mesh.values.max() == pytest.approx(1.0, abs=1e-12)
        assert sphere_mesh.values.min() == pytest.approx(-1.0, abs=1e-12)

    def test_rp2_minimal(self, rp2_mesh):
        assert (rp2_mesh.V, rp2_mesh.E, rp2_mesh.F) == (6, 15, 10)
        assert rp2_mesh.euler_characteristic == 1

    def test_rp2_subdivided(self):
        mesh = build_mesh(make_surface("rp2"), None, subdivisions=1)
        assert mesh.V == 6 + 15 + 10
        assert mesh.F == 60
        assert mesh.euler_characteristic == 1

    def test_circle(self, circle_mesh):
        assert (circle_mesh.V, circle_mesh.E, circle_mesh.F) == (2048, 2048, 0)
        assert circle_mesh.euler_characteristic == 0

    def test_triangles_have_distinct_vertices(self, torus_mesh):
        t = torus_mesh.triangles
        assert np.all((t[:, 0] != t[:, 1]) & (t[:, 1] != t[:, 2]) & (t[:, 0] != t[:, 2]))

    def test_values_match_field(self, torus_mesh, torus_height):
        assert np.allclose(torus_mesh.values, torus_height.value(torus_mesh.params))

    def test_resolution_too_small(self, torus, torus_height):
        with pytest.raises(ResolutionTooSmallError):
            build_mesh(torus, torus_height, n=4)

    def test_field_from_other_surface(self, torus, cos_theta):
        with pytest.raises(UnsupportedCombinationError):
            build_mesh(torus, cos_theta, n=16)

    def test_nearest_vertex(self, torus_mesh):
        k = 5 * 64 + 7
        assert torus_mesh.nearest_vertex(torus_mesh.params[k] + 1e-4) == k

    def test_component_count(self, circle_mesh):
        assert circle_mesh.component_count([0, 1, 2, 10, 11]) == 2
        assert circle_mesh.component_count([]) == 0

    def test_with_field_negates_values(self, torus_mesh, torus_height):
        neg = torus_mesh.with_field(torus_height.negated())
        assert np.allclose(neg.values, -torus_mesh.values)
        assert neg.triangles is torus_mesh.triangles


class TestMeshExport:
    """纯文本导出格式"""

    def test_torus_export(self, tmp_path, torus, torus_height):
        mesh = build_mesh(torus, torus_height, n=8)
        path = write_mesh_text(mesh, tmp_path / "mesh.txt")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "64 192 128"
        assert len(lines) == 1 + 64 + 128
        assert len(lines[1].split()) == 6
        assert len(lines[-1].split()) == 3

    def test_circle_export_writes_edges(self, tmp_path, circle):
        mesh = build_mesh(circle, builtin_field("cos-theta", circle), n=8)
        lines = write_mesh_text(mesh, tmp_path / "c.txt").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "8 8 0"
        assert len(lines) == 1 + 8 + 8
        assert "0 7" in lines[9:]
